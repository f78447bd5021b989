#include "panelfuse_cli/run_config.hpp"

#include <algorithm>
#include <fstream>

#include "panelfuse/error.hpp"

namespace panelfuse::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& config_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"input", "run"},         {"out", "run"},
        {"seed", "run"},          {"workers", "run"},
        {"replicates", "run"},    {"fit", "run"},
        {"contrast", "run"},      {"test-level", "run"},
        {"penalty", "penalty"},   {"concavity", "penalty"},
        {"lambda", "penalty"},    {"gamma", "penalty"},
        {"psi", "admm"},          {"phi", "admm"},
        {"tol-primal", "admm"},   {"tol-change", "admm"},
        {"max-iter", "admm"},     {"krylov-tol", "admm"},
        {"linear-solver", "admm"}, {"grid-preset", "tuning"},
        {"bic-constant", "tuning"}, {"tol-fuse", "tuning"},
        {"ridge-lambda", "ridge"}, {"ridge-gamma", "ridge"},
        {"dgp", "simulation"},    {"n", "simulation"},
        {"t", "simulation"},      {"error", "simulation"},
        {"sigma2", "simulation"}, {"tau", "simulation"},
    };
    return keys;
}

std::vector<std::string> config_file_arguments(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file " + path.string(), 0);
    const auto& keys = config_keys();
    std::vector<std::string> args;
    std::string section;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = trim(raw);
        if (text.empty() || text[0] == '#' || text[0] == ';') continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ParseError("unterminated section header", line);
            section = trim(text.substr(1, text.size() - 2));
            const bool known = std::any_of(keys.begin(), keys.end(),
                                           [&](const auto& kv) { return kv.second == section; });
            if (!known) throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        const std::string key = trim(text.substr(0, eq));
        std::string value = trim(text.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        const auto it = std::find_if(keys.begin(), keys.end(),
                                     [&](const auto& kv) { return kv.first == key; });
        if (it == keys.end()) throw ParseError("unknown key '" + key + "'", line);
        if (!section.empty() && it->second != section) {
            throw ParseError("key '" + key + "' belongs to [" + it->second + "], not [" +
                                 section + "]",
                             line);
        }
        args.push_back("--" + key + "=" + value);
    }
    return args;
}

PathOptions RunConfig::path_options() const {
    PathOptions opt;
    opt.c_nt = bic_constant;
    opt.tol_fuse = tol_fuse;
    opt.workers = workers;
    return opt;
}

void RunConfig::validate() const {
    admm.validate();
    panelfuse::validate(lambda_spec(), admm.psi);
    panelfuse::validate(gamma_spec(), admm.phi);
    ridge.validate();
    error.validate();
    if (!(tol_fuse >= 0.0)) throw InvalidArgument("tol-fuse must be nonnegative");
    if (bic_constant && !(*bic_constant > 0.0)) {
        throw InvalidArgument("bic-constant must be positive");
    }
    if (workers < 1) throw InvalidArgument("workers must be at least 1");
    if (replicates < 1) throw InvalidArgument("replicates must be at least 1");
    if (!(test_level > 0.0 && test_level < 1.0)) {
        throw InvalidArgument("test-level must lie in (0, 1)");
    }
    grid().validate();
    if ((command == "fit" || command == "tune") && input.empty()) {
        throw InvalidArgument(command + " needs --input <panel.csv>");
    }
    if (command == "test" && (fit_report.empty() || contrast.empty())) {
        throw InvalidArgument("test needs --fit <fit.json> and --contrast <rows>");
    }
}

}  // namespace panelfuse::cli
