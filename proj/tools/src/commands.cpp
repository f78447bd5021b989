#include "panelfuse_cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "panelfuse/csv.hpp"
#include "panelfuse/error.hpp"
#include "panelfuse/random.hpp"
#include "panelfuse/ridge_init.hpp"

namespace panelfuse::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

AxisLabels labels_of(const LabeledPanel& lp) {
    return {lp.individual_labels, lp.period_labels};
}

void add_mean(RmseBias& acc, const RmseBias& v, double weight) {
    acc.rmse += weight * v.rmse;
    acc.bias += weight * v.bias;
}

json rmse_bias_json(const RmseBias& v) { return json{{"rmse", v.rmse}, {"bias", v.bias}}; }

}  // namespace

FitSummary summarize_fit(const PanelData& panel, const DesignMatrix& design, FitResult fit,
                         BlockPartition partition) {
    FitSummary out{std::move(fit), std::move(partition), std::nullopt, {}};
    try {
        out.post = post_estimate(panel, design, out.partition);
    } catch (const DegenerateFit& e) {
        out.post_error = e.what();
    }
    return out;
}

json meta_json(const RunConfig& cfg, const PanelShape& shape) {
    json meta{{"tool", "panelfuse"},
              {"version", kVersion},
              {"command", cfg.command},
              {"n_individuals", shape.n_individuals},
              {"n_periods", shape.n_periods},
              {"n_covariates", shape.n_covariates},
              {"penalty", std::string(to_string(cfg.penalty))},
              {"concavity", cfg.resolved_concavity()},
              {"psi", cfg.admm.psi},
              {"phi", cfg.admm.phi},
              {"tol_primal", cfg.admm.tol_primal},
              {"tol_change", cfg.admm.tol_change},
              {"max_iter", cfg.admm.max_iterations},
              {"ridge_lambda", cfg.ridge.lambda_star},
              {"ridge_gamma", cfg.ridge.gamma_star},
              {"tol_fuse", cfg.tol_fuse},
              {"seed", cfg.seed}};
    if (!cfg.input.empty()) meta["input"] = cfg.input.string();
    return meta;
}

json fit_report(const RunConfig& cfg, const FitSummary& summary, const AxisLabels& labels) {
    const auto& shape = summary.fit.state.beta.shape;
    json report = empty_report();
    report["meta"] = meta_json(cfg, shape);
    report["meta"]["lambda"] = summary.fit.lambda;
    report["meta"]["gamma"] = summary.fit.gamma;
    report["estimate"] = estimate_json(summary.fit.state.beta, labels);
    report["estimate"]["objective"] = summary.fit.objective;
    report["estimate"]["sse"] = summary.fit.sse;
    report["partition"] = partition_json(summary.partition);
    if (summary.post) {
        report["inference"] = inference_json(*summary.post);
        report["inference"]["post_beta"] = estimate_json(summary.post->beta, labels)["beta"];
    } else {
        report["inference"] = json{{"available", false}, {"reason", summary.post_error}};
    }
    report["diagnostics"] = json{{"converged", summary.fit.converged},
                                 {"iterations", summary.fit.state.iteration},
                                 {"primal_residual", summary.fit.state.primal_residual}};
    return report;
}

std::uint64_t replicate_seed(std::uint64_t master, int r) {
    return Rng(master).split(static_cast<std::uint64_t>(r)).seed();
}

ReplicateSummary run_replicates(const RunConfig& cfg) {
    cfg.validate();
    ReplicateSummary summary;
    summary.records.resize(static_cast<std::size_t>(cfg.replicates));
    const TuningGrid grid = cfg.grid();
    PathOptions popt = cfg.path_options();
    popt.workers = 1;  // parallelism is across replicates

    auto run_one = [&](int r) {
        ReplicateRecord& rec = summary.records[static_cast<std::size_t>(r)];
        rec.index = r;
        rec.seed = replicate_seed(cfg.seed, r);
        try {
            const auto inst = generate(cfg.dgp, cfg.n_individuals, cfg.n_periods, cfg.error, rec.seed);
            rec.true_blocks = inst.truth.n_blocks();
            const auto design = build_design(inst.panel);
            const auto idx = build_fusion_index(cfg.n_individuals, cfg.n_periods);
            const auto init = ridge_init(inst.panel, design, cfg.ridge, cfg.admm.linear);
            const auto path = solution_path(inst.panel, design, idx, grid, cfg.penalty,
                                            cfg.resolved_concavity(), cfg.admm, init, popt);
            rec.lambda = path.best().lambda;
            rec.gamma = path.best().gamma;
            rec.l_hat = path.selected_partition.n_blocks();
            rec.eri = extended_rand_index(path.selected_partition, inst.truth);
            rec.penalized = rmse_bias(path.selected_fit.state.beta, inst.true_beta);
            rec.oracle = rmse_bias(post_estimate(inst.panel, design, inst.truth).beta, inst.true_beta);
            try {
                rec.post = rmse_bias(post_estimate(inst.panel, design, path.selected_partition).beta,
                                     inst.true_beta);
            } catch (const DegenerateFit& e) {
                rec.error = std::string("post estimate: ") + e.what();
            }
            rec.ok = true;
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.workers, static_cast<unsigned>(cfg.replicates)));
    if (workers == 1) {
        for (int r = 0; r < cfg.replicates; ++r) run_one(r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (int r = next++; r < cfg.replicates; r = next++) run_one(r);
            });
        }
    }

    int ok = 0;
    int with_post = 0;
    std::vector<Index> l_hats;
    Index true_blocks = 0;
    for (const auto& rec : summary.records) {
        l_hats.push_back(rec.ok ? rec.l_hat : 0);
        if (!rec.ok) {
            ++summary.failures;
            continue;
        }
        true_blocks = rec.true_blocks;
        ++ok;
        with_post += rec.post.has_value();
    }
    summary.per = true_blocks > 0 ? percent_correct_L(l_hats, true_blocks) : 0.0;
    for (const auto& rec : summary.records) {
        if (!rec.ok) continue;
        const double w = 1.0 / ok;
        summary.eri += w * rec.eri.eri;
        summary.eri_t += w * rec.eri.eri_t;
        summary.eri_n += w * rec.eri.eri_n;
        add_mean(summary.penalized, rec.penalized, w);
        add_mean(summary.oracle, rec.oracle, w);
        if (rec.post) add_mean(summary.post, *rec.post, 1.0 / with_post);
    }
    return summary;
}

std::string replicate_table_csv(const ReplicateSummary& summary) {
    std::ostringstream out;
    out << "replicate,seed,ok,gamma,lambda,l_hat,true_blocks,eri,eri_t,eri_n,rmse_penalized,"
           "bias_penalized,rmse_post,bias_post,rmse_oracle,bias_oracle,error\n";
    for (const auto& r : summary.records) {
        std::string err = r.error;
        for (char& ch : err) {
            if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        out << r.index + 1 << ',' << r.seed << ',' << r.ok << ',' << format_number(r.gamma) << ','
            << format_number(r.lambda) << ',' << r.l_hat << ',' << r.true_blocks << ','
            << format_number(r.eri.eri) << ',' << format_number(r.eri.eri_t) << ','
            << format_number(r.eri.eri_n) << ',' << format_number(r.penalized.rmse) << ','
            << format_number(r.penalized.bias) << ','
            << (r.post ? format_number(r.post->rmse) : "") << ','
            << (r.post ? format_number(r.post->bias) : "") << ','
            << format_number(r.oracle.rmse) << ',' << format_number(r.oracle.bias) << ',' << err
            << '\n';
    }
    return out.str();
}

std::string aggregate_csv(const ReplicateSummary& s) {
    std::ostringstream out;
    out << "estimator,rmse,bias,per,eri,eri_t,eri_n,replicates,failures\n";
    const auto n = s.records.size();
    auto row = [&](const char* name, const RmseBias& v) {
        out << name << ',' << format_number(v.rmse) << ',' << format_number(v.bias) << ','
            << format_number(s.per) << ',' << format_number(s.eri) << ','
            << format_number(s.eri_t) << ',' << format_number(s.eri_n) << ',' << n << ','
            << s.failures << '\n';
    };
    row("penalized", s.penalized);
    row("post", s.post);
    row("oracle", s.oracle);
    return out.str();
}

json aggregate_json(const RunConfig& cfg, const ReplicateSummary& s) {
    json report = empty_report();
    report["meta"] = meta_json(cfg, PanelShape{cfg.n_individuals, cfg.n_periods, 2});
    report["meta"]["dgp"] = cfg.dgp;
    report["meta"]["error"] = cfg.error.kind == ErrorSpec::Kind::Homoscedastic ? "homo" : "hetero";
    report["meta"]["error_value"] = cfg.error.value;
    report["meta"]["replicates"] = cfg.replicates;
    report["meta"]["grid_preset"] = cfg.grid_preset;
    report["estimate"] = json{{"penalized", rmse_bias_json(s.penalized)},
                              {"post", rmse_bias_json(s.post)},
                              {"oracle", rmse_bias_json(s.oracle)}};
    json l_hats = json::array();
    for (const auto& r : s.records) l_hats.push_back(r.l_hat);
    report["partition"] = json{{"per", s.per},
                               {"eri", s.eri},
                               {"eri_t", s.eri_t},
                               {"eri_n", s.eri_n},
                               {"l_hat", l_hats}};
    json reps = json::array();
    for (const auto& r : s.records) {
        json item{{"replicate", r.index + 1}, {"seed", r.seed}, {"ok", r.ok},
                  {"gamma", r.gamma},         {"lambda", r.lambda}};
        if (!r.error.empty()) item["error"] = r.error;
        reps.push_back(std::move(item));
    }
    report["diagnostics"] = json{{"failures", s.failures}, {"replicates", reps}};
    return report;
}

int cmd_fit(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto lp = ingest_csv(cfg.input);
    const auto design = build_design(lp.panel);
    const auto idx = build_fusion_index(lp.panel.n_individuals(), lp.panel.n_periods());
    const auto init = ridge_init(lp.panel, design, cfg.ridge, cfg.admm.linear);
    auto fit = run_admm(lp.panel, design, idx, cfg.lambda_spec(), cfg.gamma_spec(), cfg.admm, init);
    auto partition = recover_blocks(fit.state, idx, cfg.tol_fuse);
    const auto summary = summarize_fit(lp.panel, design, std::move(fit), std::move(partition));
    const AxisLabels labels = labels_of(lp);

    write_json(cfg.out_dir / "fit.json", fit_report(cfg, summary, labels));
    write_text(cfg.out_dir / "heatmap.svg", heatmap_svg(summary.partition, labels));
    write_text(cfg.out_dir / "coefficients.csv",
               coefficient_csv(summary.fit.state.beta, summary.partition, labels));
    log << "fit: L = " << summary.partition.n_blocks() << ", iterations "
        << summary.fit.state.iteration << (summary.fit.converged ? "" : " (not converged)")
        << ", wrote " << (cfg.out_dir / "fit.json").string() << '\n';
    return 0;
}

int cmd_tune(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto lp = ingest_csv(cfg.input);
    const auto design = build_design(lp.panel);
    const auto idx = build_fusion_index(lp.panel.n_individuals(), lp.panel.n_periods());
    const auto init = ridge_init(lp.panel, design, cfg.ridge, cfg.admm.linear);
    auto path = solution_path(lp.panel, design, idx, cfg.grid(), cfg.penalty,
                              cfg.resolved_concavity(), cfg.admm, init, cfg.path_options());
    const AxisLabels labels = labels_of(lp);
    const auto summary =
        summarize_fit(lp.panel, design, path.selected_fit, path.selected_partition);

    json report = fit_report(cfg, summary, labels);
    report["meta"]["grid_preset"] = cfg.grid_preset;
    report["meta"]["bic_constant"] = cfg.path_options().c_nt.value_or(default_bic_constant(lp.panel.shape()));
    json points = json::array();
    for (const auto& p : path.points) points.push_back(path_point_json(p));
    report["diagnostics"]["path"] = points;
    report["diagnostics"]["selected"] = path_point_json(path.best());

    write_json(cfg.out_dir / "tune.json", report);
    write_text(cfg.out_dir / "bic_surface.csv", bic_surface_csv(path));
    write_text(cfg.out_dir / "heatmap.svg", heatmap_svg(summary.partition, labels));
    write_text(cfg.out_dir / "coefficients.csv",
               coefficient_csv(summary.fit.state.beta, summary.partition, labels));
    log << "tune: selected gamma = " << path.best().gamma << ", lambda = " << path.best().lambda
        << ", L = " << summary.partition.n_blocks() << ", BIC = " << path.best().bic << '\n';
    return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    const auto inst = generate(cfg.dgp, cfg.n_individuals, cfg.n_periods, cfg.error, cfg.seed);
    std::filesystem::create_directories(cfg.out_dir);
    export_csv(cfg.out_dir / "panel.csv", inst.panel);
    json truth = empty_report();
    truth["meta"] = meta_json(cfg, inst.panel.shape());
    truth["meta"]["dgp"] = cfg.dgp;
    truth["meta"]["error"] = cfg.error.kind == ErrorSpec::Kind::Homoscedastic ? "homo" : "hetero";
    truth["meta"]["error_value"] = cfg.error.value;
    truth["estimate"] = estimate_json(inst.true_beta, {});
    truth["partition"] = partition_json(inst.truth);
    write_json(cfg.out_dir / "truth.json", truth);
    write_text(cfg.out_dir / "heatmap.svg", heatmap_svg(inst.truth, {}));
    log << "simulate: " << cfg.dgp << " N = " << cfg.n_individuals << ", T = " << cfg.n_periods
        << ", L = " << inst.truth.n_blocks() << '\n';
    return 0;
}

int cmd_replicate(const RunConfig& cfg, std::ostream& log) {
    const auto summary = run_replicates(cfg);
    write_text(cfg.out_dir / "replicates.csv", replicate_table_csv(summary));
    write_text(cfg.out_dir / "aggregate.csv", aggregate_csv(summary));
    write_json(cfg.out_dir / "aggregate.json", aggregate_json(cfg, summary));
    log << "replicate: Per = " << summary.per << ", ERI = " << summary.eri
        << ", RMSE penalized/post/oracle = " << summary.penalized.rmse << '/' << summary.post.rmse
        << '/' << summary.oracle.rmse << ", failures " << summary.failures << '\n';
    return 0;
}

int cmd_test(const RunConfig& cfg, std::ostream& log) {
    cfg.validate();
    std::ifstream in(cfg.fit_report);
    if (!in) throw ParseError("cannot open fit report " + cfg.fit_report.string(), 0);
    json fit;
    try {
        fit = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("fit report is not JSON: ") + e.what(), 0);
    }
    const PostEstimate est = post_estimate_from_report(fit);
    const Eigen::MatrixXd b = parse_contrast(cfg.contrast);
    if (b.cols() != est.alpha().size()) {
        throw InvalidArgument("contrast has " + std::to_string(b.cols()) +
                              " columns but the fit has " + std::to_string(est.alpha().size()) +
                              " block coefficients");
    }
    const HypothesisSpec hyp(b);
    const auto res = chi_square_test(est, hyp);

    json report = empty_report();
    report["meta"] = json{{"tool", "panelfuse"},     {"version", kVersion},
                          {"command", "test"},        {"fit", cfg.fit_report.string()},
                          {"contrast", cfg.contrast}, {"test_level", cfg.test_level}};
    const Eigen::VectorXd value = b * est.alpha();
    report["estimate"] = json{{"contrast_value", std::vector<double>(value.data(), value.data() + value.size())}};
    report["partition"] = json{{"n_blocks", est.n_blocks()}};
    report["inference"] = json{{"statistic", res.statistic},
                               {"dof", res.dof},
                               {"p_value", res.p_value},
                               {"reject", res.p_value < cfg.test_level}};
    write_json(cfg.out_dir / "test.json", report);
    log << "test: statistic = " << res.statistic << ", dof = " << res.dof
        << ", p-value = " << res.p_value << '\n';
    return 0;
}

}  // namespace panelfuse::cli
