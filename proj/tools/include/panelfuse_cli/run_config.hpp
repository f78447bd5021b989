#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "panelfuse/admm.hpp"
#include "panelfuse/penalty.hpp"
#include "panelfuse/ridge_init.hpp"
#include "panelfuse/simulation.hpp"
#include "panelfuse/tuning.hpp"

namespace panelfuse::cli {

/// Everything a command needs. Flag names (without the leading dashes) double
/// as configuration-file keys.
struct RunConfig {
    std::string command;

    std::filesystem::path input;       // panel CSV (fit, tune)
    std::filesystem::path fit_report;  // fit JSON (test)
    std::string contrast;              // rows split by ';', entries by ','
    double test_level = 0.05;
    std::filesystem::path out_dir = ".";

    PenaltyKind penalty = PenaltyKind::SCAD;
    std::optional<double> concavity;
    double lambda = 0.5;
    double gamma = 0.5;

    std::string grid_preset = "sim";
    std::optional<double> bic_constant;
    double tol_fuse = 1e-6;

    AdmmConfig admm;
    RidgeConfig ridge;

    std::string dgp = "dgp2";
    Index n_individuals = 20;
    Index n_periods = 20;
    ErrorSpec error = ErrorSpec::homoscedastic(0.5);

    int replicates = 20;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    double resolved_concavity() const {
        return concavity ? *concavity : default_concavity(penalty);
    }
    PenaltySpec lambda_spec() const { return {penalty, lambda, resolved_concavity()}; }
    PenaltySpec gamma_spec() const { return {penalty, gamma, resolved_concavity()}; }
    TuningGrid grid() const { return TuningGrid::preset(grid_preset); }
    PathOptions path_options() const;

    /// Checks the fields the chosen command reads. Throws InvalidArgument.
    void validate() const;
};

/// Reads a flat key-value file with optional [section] headers and returns the
/// equivalent `--key=value` arguments. Keys must belong to their section.
/// Lines starting with '#' or ';' are comments. Throws ParseError.
std::vector<std::string> config_file_arguments(const std::filesystem::path& path);

/// Section that owns each configuration key.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace panelfuse::cli
