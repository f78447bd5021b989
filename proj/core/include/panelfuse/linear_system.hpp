#pragma once

#include <optional>

#include <Eigen/Dense>

#include "panelfuse/panel.hpp"

namespace panelfuse {

enum class LinearSolver { IterativeKrylov, DenseFallback };

struct LinearSolverOptions {
    LinearSolver kind = LinearSolver::IterativeKrylov;
    double krylov_tol = 1e-10;  // relative residual ||K x - b|| / ||b||
    int krylov_max_iter = 2000;
    double ridge_epsilon = 0.0;  // DenseFallback only
};

/// A x where A = psi * Omega'Omega + phi * Phi'Phi, applied matrix-free.
/// Along the individual axis this is psi * (N beta_it - sum_j beta_jt); along the
/// period axis phi * (T beta_it - sum_t' beta_it'). Fields are P x (N*T).
void apply_fusion_gram(const PanelShape& shape, double psi, double phi,
                       const Eigen::MatrixXd& in, Eigen::MatrixXd& out);

/// The symmetric system K = X'X + psi Omega'Omega + phi Phi'Phi shared by the
/// beta update and the ridge-fusion initializer. K is fixed for given
/// (design, psi, phi), so factorizations and preconditioners are built once.
class NormalSystem {
public:
    NormalSystem(const DesignMatrix& design, double psi, double phi,
                 LinearSolverOptions options = {});

    const PanelShape& shape() const { return shape_; }
    double psi() const { return psi_; }
    double phi() const { return phi_; }
    const LinearSolverOptions& options() const { return options_; }

    /// out = K x.
    void apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;

    /// Solves K x = rhs. `guess` seeds the Krylov iteration (ignored by the
    /// dense path). Throws SolverError on non-convergence or singularity.
    Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs,
                          const Eigen::MatrixXd* guess = nullptr) const;

    /// Iterations used by the most recent Krylov solve on this thread.
    static int last_iterations();

private:
    void precondition(const Eigen::MatrixXd& r, Eigen::MatrixXd& z) const;
    Eigen::MatrixXd solve_krylov(const Eigen::MatrixXd& rhs, const Eigen::MatrixXd* guess) const;

    PanelShape shape_;
    Eigen::MatrixXd x_;  // P x (N*T)
    double psi_;
    double phi_;
    LinearSolverOptions options_;
    Eigen::VectorXd slot_scale_;  // mean x_itp^2 per slot, preconditioner shift
    std::optional<Eigen::LLT<Eigen::MatrixXd>> dense_;
};

/// X'Y as a P x (N*T) field.
Eigen::MatrixXd design_cross_outcome(const DesignMatrix& design, const Eigen::VectorXd& y);

}  // namespace panelfuse
