#include "panelfuse/admm.hpp"

#include <array>
#include <cmath>
#include <type_traits>
#include <vector>
#include <limits>
#include <string>

#include "panelfuse/error.hpp"

namespace panelfuse {

void AdmmConfig::validate() const {
    if (!(psi > 0.0) || !(phi > 0.0)) throw InvalidArgument("psi and phi must be positive");
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be positive");
    if (!(tol_primal > 0.0) || !(tol_change > 0.0)) {
        throw InvalidArgument("ADMM tolerances must be positive");
    }
    if (!(linear.krylov_tol > 0.0) || linear.krylov_max_iter < 1) {
        throw InvalidArgument("Krylov tolerance and iteration cap must be positive");
    }
    if (!(linear.ridge_epsilon >= 0.0)) throw InvalidArgument("ridge_epsilon must be >= 0");
}

FusedState FusedState::from_coefficients(CoefficientField beta, const FusionIndex& idx) {
    FusedState s;
    auto diffs = fused_differences(beta, idx);
    s.beta = std::move(beta);
    s.nu = Eigen::MatrixXd::Zero(diffs.individual.rows(), diffs.individual.cols());
    s.upsilon = Eigen::MatrixXd::Zero(diffs.period.rows(), diffs.period.cols());
    s.rho = std::move(diffs.individual);
    s.delta = std::move(diffs.period);
    return s;
}

namespace {

void check_state(const FusedState& state, const FusionIndex& idx) {
    const Index p = state.beta.shape.n_covariates;
    const auto n_ind = static_cast<Index>(idx.individual_pairs.size());
    const auto n_per = static_cast<Index>(idx.period_pairs.size());
    if (state.rho.rows() != p || state.rho.cols() != n_ind || state.nu.rows() != p ||
        state.nu.cols() != n_ind || state.delta.rows() != p || state.delta.cols() != n_per ||
        state.upsilon.rows() != p || state.upsilon.cols() != n_per) {
        throw InvalidArgument("fused state shapes do not match the fusion index");
    }
}

// Endpoint cells of each pair; the first endpoint carries the + sign.
template <typename Pair>
std::vector<std::array<Index, 2>> pair_cells(const std::vector<Pair>& pairs, Index n_periods) {
    std::vector<std::array<Index, 2>> out;
    out.reserve(pairs.size());
    for (const auto& pr : pairs) {
        if constexpr (std::is_same_v<Pair, IndividualPair>) {
            out.push_back({pr.i * n_periods + pr.t, pr.j * n_periods + pr.t});
        } else {
            out.push_back({pr.i * n_periods + pr.t, pr.i * n_periods + pr.t2});
        }
    }
    return out;
}

// Fused per-iteration passes over one family of pairs, on raw column storage.
class PairSweep {
public:
    PairSweep(std::vector<std::array<Index, 2>> cells, const PenaltySpec& spec, double step)
        : cells_(std::move(cells)), spec_(spec), step_(step) {}

    // aux = prox(diff + dual/step); dual += step (diff - aux);
    // rhs[a] += step aux - dual, rhs[b] -= step aux - dual.
    void prox_dual_scatter(const Eigen::MatrixXd& diff, Eigen::MatrixXd& aux,
                           Eigen::MatrixXd& dual, Eigen::MatrixXd& rhs) const {
        const Index p = diff.rows();
        const double inv = 1.0 / step_;
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const double* d = diff.data() + static_cast<Index>(k) * p;
            double* a = aux.data() + static_cast<Index>(k) * p;
            double* u = dual.data() + static_cast<Index>(k) * p;
            double norm2 = 0.0;
            for (Index q = 0; q < p; ++q) {
                a[q] = d[q] + u[q] * inv;
                norm2 += a[q] * a[q];
            }
            const double f = prox_factor(std::sqrt(norm2), spec_, step_);
            double* ra = rhs.data() + cells_[k][0] * p;
            double* rb = rhs.data() + cells_[k][1] * p;
            for (Index q = 0; q < p; ++q) {
                a[q] *= f;
                u[q] += step_ * (d[q] - a[q]);
                const double g = step_ * a[q] - u[q];
                ra[q] += g;
                rb[q] -= g;
            }
        }
    }

    // diff = beta[a] - beta[b]; returns max ||diff - aux||.
    double differences(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& aux,
                       Eigen::MatrixXd& diff) const {
        const Index p = beta.rows();
        double worst = 0.0;
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            const double* ba = beta.data() + cells_[k][0] * p;
            const double* bb = beta.data() + cells_[k][1] * p;
            const double* a = aux.data() + static_cast<Index>(k) * p;
            double* d = diff.data() + static_cast<Index>(k) * p;
            double gap2 = 0.0;
            for (Index q = 0; q < p; ++q) {
                d[q] = ba[q] - bb[q];
                gap2 += (d[q] - a[q]) * (d[q] - a[q]);
            }
            worst = std::max(worst, gap2);
        }
        return std::sqrt(worst);
    }

private:
    std::vector<std::array<Index, 2>> cells_;
    PenaltySpec spec_;
    double step_;
};

}  // namespace

FusedUpdate update_fused(const FusedState& state, const FusionIndex& idx,
                         const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                         const AdmmConfig& config) {
    check_state(state, idx);
    validate(lambda_spec, config.psi);
    validate(gamma_spec, config.phi);
    const auto diffs = fused_differences(state.beta, idx);
    FusedUpdate out{diffs.individual + state.nu / config.psi,
                    diffs.period + state.upsilon / config.phi};
    for (Index k = 0; k < out.rho.cols(); ++k) {
        out.rho.col(k) *= prox_factor(out.rho.col(k).norm(), lambda_spec, config.psi);
    }
    for (Index k = 0; k < out.delta.cols(); ++k) {
        out.delta.col(k) *= prox_factor(out.delta.col(k).norm(), gamma_spec, config.phi);
    }
    return out;
}

DualUpdate update_duals(const FusedState& state, const FusionIndex& idx,
                        const Eigen::MatrixXd& rho_new, const Eigen::MatrixXd& delta_new,
                        const AdmmConfig& config) {
    check_state(state, idx);
    const auto diffs = fused_differences(state.beta, idx);
    return {state.nu + config.psi * (diffs.individual - rho_new),
            state.upsilon + config.phi * (diffs.period - delta_new)};
}

Eigen::MatrixXd beta_rhs(const Eigen::MatrixXd& xty, const FusionIndex& idx, double psi,
                         double phi, const Eigen::MatrixXd& rho, const Eigen::MatrixXd& nu,
                         const Eigen::MatrixXd& delta, const Eigen::MatrixXd& upsilon) {
    Eigen::MatrixXd rhs = xty;
    const Index t_count = idx.n_periods;
    Index k = 0;
    for (const auto& [i, j, t] : idx.individual_pairs) {
        const auto w = psi * rho.col(k) - nu.col(k);
        rhs.col(i * t_count + t) += w;
        rhs.col(j * t_count + t) -= w;
        ++k;
    }
    k = 0;
    for (const auto& [i, t, t2] : idx.period_pairs) {
        const auto w = phi * delta.col(k) - upsilon.col(k);
        rhs.col(i * t_count + t) += w;
        rhs.col(i * t_count + t2) -= w;
        ++k;
    }
    return rhs;
}

CoefficientField solve_beta(const PanelData& panel, const DesignMatrix& design,
                            const FusionIndex& idx, const FusedState& state,
                            const AdmmConfig& config) {
    check_state(state, idx);
    const NormalSystem system(design, config.psi, config.phi, config.linear);
    const Eigen::MatrixXd rhs =
        beta_rhs(design_cross_outcome(design, panel.outcomes()), idx, config.psi, config.phi,
                 state.rho, state.nu, state.delta, state.upsilon);
    return {panel.shape(), system.solve(rhs, &state.beta.values)};
}

FitResult run_admm(const PanelData& panel, const DesignMatrix& design, const FusionIndex& idx,
                   const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                   const AdmmConfig& config, const CoefficientField& init) {
    config.validate();
    const NormalSystem system(design, config.psi, config.phi, config.linear);
    return run_admm(panel, design, idx, lambda_spec, gamma_spec, config, init, system);
}

FitResult run_admm(const PanelData& panel, const DesignMatrix& design, const FusionIndex& idx,
                   const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                   const AdmmConfig& config, const CoefficientField& init,
                   const NormalSystem& system) {
    config.validate();
    validate(lambda_spec, config.psi);
    validate(gamma_spec, config.phi);
    if (!(init.shape == panel.shape())) {
        throw InvalidArgument("initial coefficients do not match the panel shape");
    }
    if (system.psi() != config.psi || system.phi() != config.phi) {
        throw InvalidArgument("normal system was built for different psi/phi");
    }

    const Eigen::MatrixXd xty = design_cross_outcome(design, panel.outcomes());
    FitResult fit;
    fit.lambda = lambda_spec.level;
    fit.gamma = gamma_spec.level;
    FusedState& st = fit.state;
    st = FusedState::from_coefficients(init, idx);

    const PairSweep individual(pair_cells(idx.individual_pairs, idx.n_periods), lambda_spec,
                               config.psi);
    const PairSweep period(pair_cells(idx.period_pairs, idx.n_periods), gamma_spec, config.phi);
    Eigen::MatrixXd diff_ind = st.rho;
    Eigen::MatrixXd diff_per = st.delta;
    Eigen::MatrixXd rhs;

    for (int s = 1; s <= config.max_iterations; ++s) {
        rhs = xty;
        individual.prox_dual_scatter(diff_ind, st.rho, st.nu, rhs);
        period.prox_dual_scatter(diff_per, st.delta, st.upsilon, rhs);

        Eigen::MatrixXd next = system.solve(rhs, &st.beta.values);
        if (!next.allFinite()) {
            throw SolverError("non-finite coefficients at ADMM iteration " + std::to_string(s),
                              std::numeric_limits<double>::infinity());
        }
        const double change = (next - st.beta.values).cwiseAbs().maxCoeff();
        st.beta.values = std::move(next);
        st.primal_residual = std::max(individual.differences(st.beta.values, st.rho, diff_ind),
                                      period.differences(st.beta.values, st.delta, diff_per));
        st.iteration = s;
        if (st.primal_residual <= config.tol_primal && change <= config.tol_change) {
            fit.converged = true;
            break;
        }
    }
    fit.sse = sum_squared_residuals(panel, design, st.beta);
    fit.objective = objective_value(panel, design, idx, st.beta, lambda_spec, gamma_spec);
    return fit;
}

double sum_squared_residuals(const PanelData& panel, const DesignMatrix& design,
                             const CoefficientField& beta) {
    const Eigen::VectorXd fitted =
        (design.rows.array() * beta.values.array()).colwise().sum().transpose();
    return (panel.outcomes() - fitted).squaredNorm();
}

double objective_value(const PanelData& panel, const DesignMatrix& design,
                       const FusionIndex& idx, const CoefficientField& beta,
                       const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec) {
    double value = 0.5 * sum_squared_residuals(panel, design, beta);
    const auto diffs = fused_differences(beta, idx);
    for (Index k = 0; k < diffs.individual.cols(); ++k) {
        value += penalty_value(diffs.individual.col(k).norm(), lambda_spec);
    }
    for (Index k = 0; k < diffs.period.cols(); ++k) {
        value += penalty_value(diffs.period.col(k).norm(), gamma_spec);
    }
    return value;
}

}  // namespace panelfuse
