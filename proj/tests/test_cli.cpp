#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "panelfuse_cli/commands.hpp"

using namespace panelfuse;
using panelfuse::cli::json;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("panelfuse_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int status = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "panelfuse");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.status = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
}

void check_report_shape(const json& report) {
    for (const char* key : {"meta", "estimate", "partition", "inference", "diagnostics"}) {
        CHECK(report.contains(key));
    }
    CHECK(report.size() == 5);
    CHECK(report["meta"]["tool"] == "panelfuse");
}

}  // namespace

TEST_CASE("fit with zero penalties on intercept-only data is saturated") {
    TempDir dir("saturated");
    std::mt19937_64 gen(1);
    const PanelData panel(3, 4, oracle::random_matrix(12, 1, gen), Eigen::MatrixXd(0, 12));
    export_csv(dir.path / "panel.csv", panel);
    const auto r = run({"fit", "--input", (dir.path / "panel.csv").string(), "--lambda", "0", "--gamma", "0",
                        "--out", (dir.path / "fit").string()});
    REQUIRE(r.status == 0);
    const auto report = read_json(dir.path / "fit" / "fit.json");
    check_report_shape(report);
    CHECK(report["partition"]["n_blocks"] == 12);
    const auto& beta = report["estimate"]["beta"];
    REQUIRE(beta.size() == 12);
    for (Index c = 0; c < 12; ++c) {
        CHECK(beta[static_cast<std::size_t>(c)][0].get<double>() == doctest::Approx(panel.outcomes()(c)).epsilon(1e-3));
    }
    // NT = LP leaves no residual degrees of freedom
    CHECK(report["inference"]["available"] == false);
}

TEST_CASE("tune recovers a noiseless two-block truth") {
    TempDir dir("tune");
    std::mt19937_64 gen(2);
    BlockPartition truth;
    const auto panel = oracle::noiseless_two_block(
        8, 8, Eigen::Vector2d(-2, 3), Eigen::Vector2d(2, 5),
        [](Index i, Index t) { return i >= 4 && t >= 3; }, gen, &truth);
    export_csv(dir.path / "panel.csv", panel);
    const auto r = run({"tune", "--input", (dir.path / "panel.csv").string(), "--out", dir.path.string()});
    REQUIRE(r.status == 0);
    const auto report = read_json(dir.path / "tune.json");
    check_report_shape(report);
    CHECK(report["diagnostics"]["path"].size() == 225);
    const auto& labels = report["partition"]["labels"];
    REQUIRE(labels.size() == 8);
    for (Index i = 0; i < 8; ++i) {
        for (Index t = 0; t < 8; ++t) {
            const int expect = static_cast<int>(truth.label(i, t)) + 1;
            CHECK(labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] == expect);
        }
    }
    const auto svg = read_text(dir.path / "heatmap.svg");
    const std::regex cell("<rect[^>]*data-block=");
    const auto n_cells = std::distance(std::sregex_iterator(svg.begin(), svg.end(), cell), std::sregex_iterator());
    CHECK(n_cells == 64);
    const auto surface = read_text(dir.path / "bic_surface.csv");
    CHECK(std::count(surface.begin(), surface.end(), '\n') == 226);
    CHECK(fs::exists(dir.path / "coefficients.csv"));
}

TEST_CASE("simulate, fit and test chain through files") {
    TempDir dir("chain");
    const auto sim = run({"simulate", "--dgp", "dgp2", "--n", "10", "--t", "4", "--sigma2", "0.1", "--seed", "5",
                          "--out", (dir.path / "sim").string()});
    REQUIRE(sim.status == 0);
    const auto truth = read_json(dir.path / "sim" / "truth.json");
    check_report_shape(truth);
    CHECK(truth["partition"]["n_blocks"] == 3);
    const auto back = ingest_csv(dir.path / "sim" / "panel.csv");
    CHECK(back.panel == gen_dgp2(10, 4, ErrorSpec::homoscedastic(0.1), 5).panel);

    const auto fit = run({"fit", "--input", (dir.path / "sim" / "panel.csv").string(), "--lambda", "1.0",
                          "--gamma", "1.0", "--out", (dir.path / "fit").string()});
    REQUIRE(fit.status == 0);
    check_report_shape(read_json(dir.path / "fit" / "fit.json"));

    const auto tune = run({"tune", "--input", (dir.path / "sim" / "panel.csv").string(), "--out",
                           (dir.path / "tune").string()});
    REQUIRE(tune.status == 0);
    const auto report = read_json(dir.path / "tune" / "tune.json");
    REQUIRE(report["inference"]["available"] == true);
    CHECK(report["partition"]["labels"] == truth["partition"]["labels"]);
    const Index lp = report["partition"]["n_blocks"].get<Index>() * 2;

    std::string contrast;
    for (Index k = 0; k < lp; ++k) contrast += (k ? "," : "") + std::string(k == 1 ? "1" : "0");
    const auto test = run({"test", "--fit", (dir.path / "tune" / "tune.json").string(), "--contrast", contrast,
                           "--out", (dir.path / "test").string()});
    REQUIRE(test.status == 0);
    const auto t = read_json(dir.path / "test" / "test.json");
    check_report_shape(t);
    const double stat = t["inference"]["statistic"].get<double>();
    const double se = report["inference"]["standard_errors"][0][1].get<double>();
    const double a = report["inference"]["alpha"][0][1].get<double>();
    CHECK(stat == doctest::Approx((a / se) * (a / se)).epsilon(1e-9));
    CHECK(t["inference"]["reject"] == (t["inference"]["p_value"].get<double>() < 0.05));
}

TEST_CASE("replicate writes aggregate tables") {
    TempDir dir("replicate");
    const auto r = run({"replicate", "--dgp", "dgp2", "--n", "10", "--t", "4", "--replicates", "2", "--workers",
                        "2", "--grid-preset", "sim", "--out", dir.path.string()});
    REQUIRE(r.status == 0);
    const auto agg = read_json(dir.path / "aggregate.json");
    check_report_shape(agg);
    CHECK(agg["diagnostics"]["replicates"].size() == 2);
    CHECK(agg["partition"]["per"].get<double>() >= 0.0);
    CHECK(fs::exists(dir.path / "aggregate.csv"));
    const auto table = read_text(dir.path / "replicates.csv");
    CHECK(std::count(table.begin(), table.end(), '\n') == 3);
    CHECK(cli::replicate_seed(1, 0) != cli::replicate_seed(1, 1));
    CHECK(cli::replicate_seed(1, 0) == cli::replicate_seed(1, 0));
}

TEST_CASE("configuration file with flag overrides") {
    TempDir dir("config");
    {
        std::ofstream cfg(dir.path / "run.ini");
        cfg << "# simulated panel\n[run]\nseed = 9\nout = " << (dir.path / "from_file").string()
            << "\n[simulation]\ndgp = dgp1\nn = 8\nt = 10\n";
    }
    const auto r = run({"simulate", "--config", (dir.path / "run.ini").string(), "--t", "12"});
    REQUIRE(r.status == 0);
    const auto truth = read_json(dir.path / "from_file" / "truth.json");
    CHECK(truth["meta"]["dgp"] == "dgp1");
    CHECK(truth["meta"]["n_individuals"] == 8);
    CHECK(truth["meta"]["n_periods"] == 12);

    {
        std::ofstream bad(dir.path / "bad.ini");
        bad << "[run]\nseed = 1\nlambda = 0.3\n";
    }
    const auto b = run({"simulate", "--config", (dir.path / "bad.ini").string()});
    CHECK(b.status == 2);
    const auto err = json::parse(b.err);
    CHECK(err["error"]["type"] == "parse_error");
    CHECK(err["error"]["line"] == 3);
}

TEST_CASE("failures produce error JSON and a nonzero status") {
    TempDir dir("errors");
    {
        std::ofstream csv(dir.path / "broken.csv");
        csv << "i,t,y\n1,1,0\n1,2,x\n2,1,0\n2,2,0\n";
    }
    const auto r = run({"fit", "--input", (dir.path / "broken.csv").string(), "--out", dir.path.string()});
    CHECK(r.status == 1);
    const auto err = json::parse(r.err);
    CHECK(err["error"]["type"] == "parse_error");
    CHECK(err["error"]["line"] == 3);
    CHECK(read_json(dir.path / "error.json") == err);

    CHECK(run({"fit", "--penalty", "ridge"}).status == 2);
    CHECK(run({"fit", "--out", dir.path.string()}).status == 1);
    const auto dgp = run({"simulate", "--dgp", "dgp2", "--n", "15", "--out", dir.path.string()});
    CHECK(dgp.status == 1);
    CHECK(json::parse(dgp.err)["error"]["type"] == "invalid_argument");
}

TEST_CASE("report helpers") {
    const auto m = cli::parse_contrast("1,0,-1,0; 0,1,0,-1");
    CHECK(m.rows() == 2);
    CHECK(m(1, 3) == -1.0);
    CHECK_THROWS_AS(cli::parse_contrast("1,0;1"), InvalidArgument);
    CHECK_THROWS_AS(cli::parse_contrast("a,b"), InvalidArgument);

    const BlockPartition part({2, 3, 1}, {0, 0, 1, 0, 1, 1}, (Eigen::MatrixXd(1, 2) << 1.5, -2.0).finished());
    const auto pj = cli::partition_json(part);
    CHECK(pj["labels"] == json::parse("[[1,1,2],[1,2,2]]"));
    CHECK(pj["block_sizes"] == json::parse("[3,3]"));

    // post estimates survive a JSON round trip
    std::mt19937_64 gen(3);
    const auto panel = oracle::random_panel(4, 3, 2, gen);
    const BlockPartition two({4, 3, 2}, {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, Eigen::MatrixXd::Zero(2, 2));
    const auto est = post_estimate(panel, build_design(panel), two);
    json report = cli::empty_report();
    report["partition"] = cli::partition_json(est.partition);
    report["inference"] = cli::inference_json(est);
    const auto back = cli::post_estimate_from_report(json::parse(report.dump()));
    CHECK((back.alpha() - est.alpha()).norm() == 0.0);
    CHECK((back.covariance - est.covariance).norm() == 0.0);
    CHECK(back.dof == est.dof);
}
