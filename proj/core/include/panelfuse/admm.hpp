#pragma once

#include <utility>

#include <Eigen/Dense>

#include "panelfuse/linear_system.hpp"
#include "panelfuse/panel.hpp"
#include "panelfuse/penalty.hpp"

namespace panelfuse {

struct AdmmConfig {
    double psi = 1.0;  // augmentation weight for individual-pair constraints
    double phi = 1.0;  // augmentation weight for period-pair constraints
    int max_iterations = 2000;
    double tol_primal = 1e-4;
    double tol_change = 1e-5;
    LinearSolverOptions linear{};

    /// Throws InvalidArgument when a field is out of range.
    void validate() const;
};

/// ADMM iterate: coefficients, fused auxiliaries and their duals.
/// Pair arrays are P x |pairs| in FusionIndex order.
struct FusedState {
    CoefficientField beta;
    Eigen::MatrixXd rho;
    Eigen::MatrixXd delta;
    Eigen::MatrixXd nu;
    Eigen::MatrixXd upsilon;
    int iteration = 0;
    double primal_residual = 0.0;

    /// rho/delta from the fused differences of `beta`, zero duals.
    static FusedState from_coefficients(CoefficientField beta, const FusionIndex& idx);
};

struct FitResult {
    FusedState state;
    bool converged = false;
    double lambda = 0.0;
    double gamma = 0.0;
    double objective = 0.0;
    double sse = 0.0;
};

struct FusedUpdate {
    Eigen::MatrixXd rho;
    Eigen::MatrixXd delta;
};

struct DualUpdate {
    Eigen::MatrixXd nu;
    Eigen::MatrixXd upsilon;
};

/// Groupwise proximal step on xi = beta_it - beta_jt + nu/psi and
/// theta = beta_it - beta_it' + upsilon/phi.
FusedUpdate update_fused(const FusedState& state, const FusionIndex& idx,
                         const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                         const AdmmConfig& config);

/// Dual ascent using the coefficients held in `state` (the pre-update beta).
DualUpdate update_duals(const FusedState& state, const FusionIndex& idx,
                        const Eigen::MatrixXd& rho_new, const Eigen::MatrixXd& delta_new,
                        const AdmmConfig& config);

/// Right-hand side X'Y + Omega'(psi rho - nu) + Phi'(phi delta - upsilon).
Eigen::MatrixXd beta_rhs(const Eigen::MatrixXd& xty, const FusionIndex& idx, double psi,
                         double phi, const Eigen::MatrixXd& rho, const Eigen::MatrixXd& nu,
                         const Eigen::MatrixXd& delta, const Eigen::MatrixXd& upsilon);

/// Least-squares step for beta given the auxiliaries in `state`.
CoefficientField solve_beta(const PanelData& panel, const DesignMatrix& design,
                            const FusionIndex& idx, const FusedState& state,
                            const AdmmConfig& config);

/// Full ADMM loop. Each iteration updates rho/delta, then nu/upsilon, then beta.
FitResult run_admm(const PanelData& panel, const DesignMatrix& design, const FusionIndex& idx,
                   const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                   const AdmmConfig& config, const CoefficientField& init);

/// Same, reusing a prebuilt normal system (must match config.psi/phi).
FitResult run_admm(const PanelData& panel, const DesignMatrix& design, const FusionIndex& idx,
                   const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec,
                   const AdmmConfig& config, const CoefficientField& init,
                   const NormalSystem& system);

double sum_squared_residuals(const PanelData& panel, const DesignMatrix& design,
                             const CoefficientField& beta);

/// 1/2 SSE + sum of lambda-penalties over individual pairs + gamma-penalties
/// over period pairs, evaluated at beta.
double objective_value(const PanelData& panel, const DesignMatrix& design,
                       const FusionIndex& idx, const CoefficientField& beta,
                       const PenaltySpec& lambda_spec, const PenaltySpec& gamma_spec);

}  // namespace panelfuse
