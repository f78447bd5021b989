#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "panelfuse/admm.hpp"
#include "panelfuse/panel.hpp"
#include "panelfuse/penalty.hpp"

namespace panelfuse {

/// Strictly ascending, nonnegative grids for gamma (rows) and lambda (columns).
struct TuningGrid {
    std::vector<double> gamma_values;
    std::vector<double> lambda_values;

    void validate() const;
    std::size_t size() const { return gamma_values.size() * lambda_values.size(); }

    /// {0.1, 0.2, ..., 1.5} for both parameters.
    static TuningGrid simulation_preset();
    /// {0.2, 0.4, ..., 3.0} for both parameters.
    static TuningGrid empirical_preset();
    static TuningGrid preset(std::string_view name);
    /// first, first + step, ... up to last (inclusive, within step/1e6).
    static std::vector<double> arithmetic(double first, double last, double step);
};

/// log(NTP), the default complexity multiplier.
double default_bic_constant(const PanelShape& shape);

/// log(SSE / NT) + c_nt * log(NT) / NT * (L_hat * P).
double bic_score(double sse, const PanelShape& shape, Index l_hat, double c_nt);
double bic_score(const FitResult& fit, const PanelData& panel, Index l_hat, double c_nt);

struct PathOptions {
    std::optional<double> c_nt;  // defaults to log(NTP)
    double tol_fuse = 1e-6;
    unsigned workers = 1;
    bool keep_fits = false;  // retain every FitResult, not only the selected one
};

struct PathPoint {
    double gamma = 0.0;
    double lambda = 0.0;
    bool ok = false;
    std::string error;
    bool converged = false;
    int iterations = 0;
    double sse = 0.0;
    double bic = 0.0;
    Index l_hat = 0;
};

struct PathResult {
    TuningGrid grid;
    std::vector<PathPoint> points;  // row-major: gamma index, then lambda index
    std::vector<std::optional<FitResult>> fits;  // populated when keep_fits
    std::size_t selected = 0;
    FitResult selected_fit;
    BlockPartition selected_partition;

    const PathPoint& at(std::size_t gamma_index, std::size_t lambda_index) const {
        return points[gamma_index * grid.lambda_values.size() + lambda_index];
    }
    const PathPoint& best() const { return points[selected]; }
};

/// Fits every grid point. Within a gamma row lambda ascends and each fit is
/// warm-started from the previous converged coefficients; every row starts
/// from `init`. Selects the minimum-BIC point; ties go to the smaller
/// (gamma, lambda). Throws SolverError when every point fails.
PathResult solution_path(const PanelData& panel, const DesignMatrix& design,
                         const FusionIndex& idx, const TuningGrid& grid, PenaltyKind kind,
                         double concavity, const AdmmConfig& config,
                         const CoefficientField& init, const PathOptions& options = {});

}  // namespace panelfuse
