#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "panelfuse/inference.hpp"
#include "panelfuse/metrics.hpp"
#include "panelfuse_cli/report.hpp"
#include "panelfuse_cli/run_config.hpp"

namespace panelfuse::cli {

/// Single fit, its recovered partition and (when estimable) post estimates.
struct FitSummary {
    FitResult fit;
    BlockPartition partition;
    std::optional<PostEstimate> post;
    std::string post_error;
};

/// Post estimates of `partition`, or the reason they are unavailable.
FitSummary summarize_fit(const PanelData& panel, const DesignMatrix& design, FitResult fit,
                         BlockPartition partition);

json meta_json(const RunConfig& cfg, const PanelShape& shape);
json fit_report(const RunConfig& cfg, const FitSummary& summary, const AxisLabels& labels);

struct ReplicateRecord {
    int index = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    double lambda = 0.0;
    double gamma = 0.0;
    Index l_hat = 0;
    Index true_blocks = 0;
    RandIndexScore eri;
    RmseBias penalized;
    std::optional<RmseBias> post;
    RmseBias oracle;
};

struct ReplicateSummary {
    std::vector<ReplicateRecord> records;
    double per = 0.0;
    double eri = 0.0;
    double eri_t = 0.0;
    double eri_n = 0.0;
    RmseBias penalized;  // means over successful replicates
    RmseBias post;
    RmseBias oracle;
    int failures = 0;
};

/// Seed of replicate r under the master seed.
std::uint64_t replicate_seed(std::uint64_t master, int r);

/// Simulates cfg.replicates instances of cfg.dgp, tunes each over the grid and
/// scores the selected fit. Replicates run on cfg.workers threads.
ReplicateSummary run_replicates(const RunConfig& cfg);

std::string replicate_table_csv(const ReplicateSummary& summary);
std::string aggregate_csv(const ReplicateSummary& summary);
json aggregate_json(const RunConfig& cfg, const ReplicateSummary& summary);

/// Each command writes its artifacts under cfg.out_dir and returns 0; module
/// failures propagate as exceptions.
int cmd_fit(const RunConfig& cfg, std::ostream& log);
int cmd_tune(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_replicate(const RunConfig& cfg, std::ostream& log);
int cmd_test(const RunConfig& cfg, std::ostream& log);

/// Parses arguments (and --config), dispatches, and turns failures into an
/// error JSON on `err` plus out_dir/error.json. Returns the exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace panelfuse::cli
