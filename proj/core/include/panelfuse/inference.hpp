#pragma once

#include <Eigen/Dense>

#include "panelfuse/admm.hpp"
#include "panelfuse/panel.hpp"

namespace panelfuse {

/// Groups cells into connected components of the graph whose edges are the
/// fused pairs (||rho_ij,t|| <= tol_fuse or ||delta_i,tt'|| <= tol_fuse).
/// Block values are the component means of beta; labels follow the smallest
/// member cell in (i, t) order.
BlockPartition recover_blocks(const FusedState& state, const FusionIndex& idx,
                              double tol_fuse = 1e-6);

/// Pooled OLS within each block of a known (or recovered) partition.
struct PostEstimate {
    BlockPartition partition;  // block_values hold the pooled estimates
    CoefficientField beta;
    double sigma_hat = 0.0;
    Index dof = 0;               // N*T - L*P
    Eigen::MatrixXd covariance;  // (L*P) x (L*P), block-diagonal

    Index n_blocks() const { return partition.n_blocks(); }
    /// Stacked (alpha_1', ..., alpha_L')'.
    Eigen::VectorXd alpha() const;
    /// Standard errors, same stacking as alpha().
    Eigen::VectorXd standard_errors() const { return covariance.diagonal().cwiseSqrt(); }
};

PostEstimate post_estimate(const PanelData& panel, const DesignMatrix& design,
                           const BlockPartition& partition);

/// Linear hypothesis B alpha = 0 with B of full row rank q.
class HypothesisSpec {
public:
    explicit HypothesisSpec(Eigen::MatrixXd contrast);
    const Eigen::MatrixXd& contrast() const { return contrast_; }
    Index q() const { return contrast_.rows(); }

private:
    Eigen::MatrixXd contrast_;
};

struct ChiSquareResult {
    double statistic = 0.0;
    Index dof = 0;
    double p_value = 1.0;
};

/// T = (B a)' (B V B')^{-1} (B a), referred to chi-square with q dof.
ChiSquareResult chi_square_test(const PostEstimate& est, const HypothesisSpec& hyp);

/// Whether iota lies in the 100(1 - tau)% confidence region for B alpha.
bool confidence_region_contains(const PostEstimate& est, const HypothesisSpec& hyp,
                                const Eigen::VectorXd& iota, double tau);

/// Upper-tail probability of chi-square with `dof` degrees of freedom.
double chi_square_sf(double x, Index dof);
double chi_square_quantile(double prob, Index dof);

}  // namespace panelfuse
