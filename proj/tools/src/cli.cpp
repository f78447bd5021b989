#include <algorithm>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "panelfuse/error.hpp"
#include "panelfuse_cli/commands.hpp"

namespace panelfuse::cli {

namespace {

// Values from --config go first so that later command-line flags win.
std::vector<std::string> expand_config(int argc, const char* const* argv) {
    std::vector<std::string> given(argv + 1, argv + argc);
    std::vector<std::string> from_file;
    for (std::size_t k = 0; k < given.size(); ++k) {
        std::string path;
        if (given[k] == "--config" && k + 1 < given.size()) {
            path = given[k + 1];
        } else if (given[k].rfind("--config=", 0) == 0) {
            path = given[k].substr(9);
        }
        if (!path.empty()) {
            auto more = config_file_arguments(path);
            from_file.insert(from_file.end(), more.begin(), more.end());
        }
    }
    from_file.insert(from_file.end(), given.begin(), given.end());
    return from_file;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Doubly penalized fused regression for heterogeneous panels", "panelfuse"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);

    std::string config_path;
    std::string penalty = "scad";
    std::string error_kind = "homo";
    std::optional<double> sigma2;
    std::optional<double> tau;
    std::string linear = "krylov";

    app.add_option("--config", config_path, "Key-value configuration file (flags override)");
    app.add_option("--input", cfg.input, "Panel CSV with header i,t,y,z1,...");
    app.add_option("--out", cfg.out_dir, "Output directory");
    app.add_option("--seed", cfg.seed, "Random seed");
    app.add_option("--workers", cfg.workers, "Worker threads");
    app.add_option("--replicates", cfg.replicates, "Monte Carlo replicates");
    app.add_option("--fit", cfg.fit_report, "Fit report JSON (test)");
    app.add_option("--contrast", cfg.contrast, "Contrast rows, e.g. \"1,0,-1,0;0,1,0,-1\" (test)");
    app.add_option("--test-level", cfg.test_level, "Test size (test)");
    app.add_option("--penalty", penalty, "Penalty")->check(CLI::IsMember({"lasso", "scad", "mcp"}));
    app.add_option("--concavity", cfg.concavity, "Concavity a (default 3.7 SCAD, 3.0 MCP)");
    app.add_option("--lambda", cfg.lambda, "Individual-pair penalty level (fit)");
    app.add_option("--gamma", cfg.gamma, "Period-pair penalty level (fit)");
    app.add_option("--psi", cfg.admm.psi, "ADMM weight for individual pairs");
    app.add_option("--phi", cfg.admm.phi, "ADMM weight for period pairs");
    app.add_option("--tol-primal", cfg.admm.tol_primal, "Primal residual tolerance");
    app.add_option("--tol-change", cfg.admm.tol_change, "Iterate change tolerance");
    app.add_option("--max-iter", cfg.admm.max_iterations, "ADMM iteration cap");
    app.add_option("--krylov-tol", cfg.admm.linear.krylov_tol, "Relative residual of the inner solve");
    app.add_option("--linear-solver", linear, "Inner solver")->check(CLI::IsMember({"krylov", "dense"}));
    app.add_option("--grid-preset", cfg.grid_preset, "Tuning grid")->check(CLI::IsMember({"sim", "empirical"}));
    app.add_option("--bic-constant", cfg.bic_constant, "BIC multiplier (default log(NTP))");
    app.add_option("--tol-fuse", cfg.tol_fuse, "Fusion threshold for block recovery");
    app.add_option("--ridge-lambda", cfg.ridge.lambda_star, "Ridge initializer, individual axis");
    app.add_option("--ridge-gamma", cfg.ridge.gamma_star, "Ridge initializer, period axis");
    app.add_option("--dgp", cfg.dgp, "Simulation design")->check(CLI::IsMember({"dgp1", "dgp2"}));
    app.add_option("--n", cfg.n_individuals, "Individuals");
    app.add_option("--t", cfg.n_periods, "Periods");
    app.add_option("--error", error_kind, "Error design")->check(CLI::IsMember({"homo", "hetero"}));
    app.add_option("--sigma2", sigma2, "Homoscedastic error variance");
    app.add_option("--tau", tau, "Heteroscedastic error scale");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fit", "Single fit at (--lambda, --gamma)"},
        {"tune", "Full (gamma, lambda) path with BIC selection"},
        {"simulate", "Write a simulated panel and its truth"},
        {"replicate", "Monte Carlo replicates of simulate + tune"},
        {"test", "Chi-square test of a linear contrast on a fit report"},
    };
    for (const auto& [name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough();
    }

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << error_json(InvalidArgument(e.what())).dump() << '\n';
        return 2;
    } catch (const Error& e) {
        err << error_json(e).dump() << '\n';
        return 2;
    }

    try {
        cfg.command = app.get_subcommands().front()->get_name();
        cfg.penalty = parse_penalty_kind(penalty);
        cfg.admm.linear.kind =
            linear == "dense" ? LinearSolver::DenseFallback : LinearSolver::IterativeKrylov;
        if (error_kind == "hetero") {
            cfg.error = ErrorSpec::heteroscedastic(tau.value_or(1.0));
        } else {
            cfg.error = ErrorSpec::homoscedastic(sigma2.value_or(0.5));
        }
        if (cfg.command == "fit") return cmd_fit(cfg, out);
        if (cfg.command == "tune") return cmd_tune(cfg, out);
        if (cfg.command == "simulate") return cmd_simulate(cfg, out);
        if (cfg.command == "replicate") return cmd_replicate(cfg, out);
        return cmd_test(cfg, out);
    } catch (const std::exception& e) {
        const json report = error_json(e);
        err << report.dump() << '\n';
        try {
            write_json(cfg.out_dir / "error.json", report);
        } catch (const std::exception&) {
        }
        return 1;
    }
}

}  // namespace panelfuse::cli
