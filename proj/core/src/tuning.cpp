#include "panelfuse/tuning.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "panelfuse/error.hpp"
#include "panelfuse/inference.hpp"

namespace panelfuse {

void TuningGrid::validate() const {
    for (const auto* values : {&gamma_values, &lambda_values}) {
        if (values->empty()) throw InvalidArgument("tuning grid must be nonempty");
        for (std::size_t k = 0; k < values->size(); ++k) {
            const double v = (*values)[k];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw InvalidArgument("tuning grid values must be finite and nonnegative");
            }
            if (k > 0 && !(v > (*values)[k - 1])) {
                throw InvalidArgument("tuning grid must be strictly ascending");
            }
        }
    }
}

std::vector<double> TuningGrid::arithmetic(double first, double last, double step) {
    if (!(step > 0.0) || last < first) throw InvalidArgument("invalid grid range");
    std::vector<double> out;
    for (int k = 0;; ++k) {
        const double v = first + k * step;
        if (v > last + step * 1e-6) break;
        out.push_back(v);
    }
    return out;
}

TuningGrid TuningGrid::simulation_preset() {
    auto v = arithmetic(0.1, 1.5, 0.1);
    return {v, v};
}

TuningGrid TuningGrid::empirical_preset() {
    auto v = arithmetic(0.2, 3.0, 0.2);
    return {v, v};
}

TuningGrid TuningGrid::preset(std::string_view name) {
    if (name == "sim") return simulation_preset();
    if (name == "empirical") return empirical_preset();
    throw InvalidArgument("unknown grid preset '" + std::string(name) + "' (sim|empirical)");
}

double default_bic_constant(const PanelShape& shape) {
    return std::log(static_cast<double>(shape.n_cells() * shape.n_covariates));
}

double bic_score(double sse, const PanelShape& shape, Index l_hat, double c_nt) {
    if (l_hat < 1) throw InvalidArgument("BIC needs at least one block");
    if (!(sse > 0.0)) {
        throw DegenerateFit("BIC undefined for an interpolating fit (SSE = 0)");
    }
    const double nt = static_cast<double>(shape.n_cells());
    return std::log(sse / nt) +
           c_nt * std::log(nt) / nt * static_cast<double>(l_hat * shape.n_covariates);
}

double bic_score(const FitResult& fit, const PanelData& panel, Index l_hat, double c_nt) {
    return bic_score(fit.sse, panel.shape(), l_hat, c_nt);
}

PathResult solution_path(const PanelData& panel, const DesignMatrix& design,
                         const FusionIndex& idx, const TuningGrid& grid, PenaltyKind kind,
                         double concavity, const AdmmConfig& config,
                         const CoefficientField& init, const PathOptions& options) {
    grid.validate();
    config.validate();
    const double c_nt = options.c_nt.value_or(default_bic_constant(panel.shape()));
    const std::size_t n_rows = grid.gamma_values.size();
    const std::size_t n_cols = grid.lambda_values.size();

    PathResult result;
    result.grid = grid;
    result.points.resize(grid.size());
    if (options.keep_fits) result.fits.resize(grid.size());
    // Per row: index and fit of its minimum-BIC point (earliest lambda on ties).
    std::vector<std::optional<std::size_t>> row_best(n_rows);
    std::vector<std::optional<FitResult>> row_best_fit(n_rows);
    const NormalSystem system(design, config.psi, config.phi, config.linear);

    auto run_row = [&](std::size_t m) {
        const PenaltySpec gamma_spec{kind, grid.gamma_values[m], concavity};
        CoefficientField warm = init;
        for (std::size_t w = 0; w < n_cols; ++w) {
            const std::size_t k = m * n_cols + w;
            PathPoint& pt = result.points[k];
            pt.gamma = grid.gamma_values[m];
            pt.lambda = grid.lambda_values[w];
            std::optional<FitResult> fit;
            try {
                const PenaltySpec lambda_spec{kind, pt.lambda, concavity};
                fit = run_admm(panel, design, idx, lambda_spec, gamma_spec, config, warm, system);
                pt.converged = fit->converged;
                pt.iterations = fit->state.iteration;
                pt.sse = fit->sse;
                warm = fit->state.beta;
                pt.l_hat = recover_blocks(fit->state, idx, options.tol_fuse).n_blocks();
                pt.bic = bic_score(*fit, panel, pt.l_hat, c_nt);
                pt.ok = true;
            } catch (const Error& e) {
                pt.ok = false;
                pt.error = e.what();
            }
            if (pt.ok && (!row_best[m] || pt.bic < result.points[*row_best[m]].bic)) {
                row_best[m] = k;
                row_best_fit[m] = fit;
            }
            if (options.keep_fits) result.fits[k] = std::move(fit);
        }
    };

    const unsigned workers =
        std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n_rows)));
    if (workers == 1) {
        for (std::size_t m = 0; m < n_rows; ++m) run_row(m);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t m = next++; m < n_rows; m = next++) run_row(m);
            });
        }
    }

    std::optional<std::size_t> best_row;
    for (std::size_t m = 0; m < n_rows; ++m) {
        if (!row_best[m]) continue;
        if (!best_row || result.points[*row_best[m]].bic < result.points[*row_best[*best_row]].bic) {
            best_row = m;
        }
    }
    if (!best_row) {
        throw SolverError("every grid point failed; first error: " + result.points.front().error,
                          std::numeric_limits<double>::quiet_NaN());
    }
    result.selected = *row_best[*best_row];
    result.selected_fit = std::move(*row_best_fit[*best_row]);
    result.selected_partition = recover_blocks(result.selected_fit.state, idx, options.tol_fuse);
    return result;
}

}  // namespace panelfuse
