#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "panelfuse/admm.hpp"
#include "panelfuse/inference.hpp"
#include "panelfuse/panel.hpp"
#include "panelfuse/tuning.hpp"

namespace panelfuse::cli {

using nlohmann::json;

/// Labels used when writing a lattice; empty lists mean dense 1-based ranks.
struct AxisLabels {
    std::vector<std::string> individuals;
    std::vector<std::string> periods;

    std::string individual(Index i) const;
    std::string period(Index t) const;
};

/// Report skeleton with the five top-level keys, each an empty object.
json empty_report();

/// beta as N*T rows of P numbers in cell order, plus the lattice labels.
json estimate_json(const CoefficientField& beta, const AxisLabels& labels);

/// 1-based labels as an N x T array, block sizes and block values.
json partition_json(const BlockPartition& partition);

/// Post estimates; the same layout cmd_test reads back.
json inference_json(const PostEstimate& est);

json path_point_json(const PathPoint& point);

/// Rebuilds a PostEstimate from the `partition` and `inference` members of a
/// fit report. Throws ParseError when fields are missing or inconsistent.
PostEstimate post_estimate_from_report(const json& report);

/// Parses "1,0,-1,0; 0,1,0,-1" into a matrix. Throws InvalidArgument.
Eigen::MatrixXd parse_contrast(const std::string& text);

/// N rows by T columns of cells coloured by block, with a legend.
std::string heatmap_svg(const BlockPartition& partition, const AxisLabels& labels);

/// gamma, lambda, ok, converged, iterations, sse, bic, l_hat, error.
std::string bic_surface_csv(const PathResult& path);

/// i, t, block, beta_0 .. beta_{P-1}.
std::string coefficient_csv(const CoefficientField& beta, const BlockPartition& partition,
                            const AxisLabels& labels);

/// Writes text to `path`, creating parent directories. Throws Error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& value);

/// {"error": {"type", "message", "line"?}}.
json error_json(const std::exception& e);

}  // namespace panelfuse::cli
