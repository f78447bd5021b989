#pragma once

#include <stdexcept>
#include <string>

namespace panelfuse {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by caller-supplied arguments.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Linear solve or iteration failed to produce a usable result.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Fit is degenerate for the requested statistic (e.g. zero SSE for BIC).
class DegenerateFit : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace panelfuse
