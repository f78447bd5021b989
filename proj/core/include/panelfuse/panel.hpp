#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "panelfuse/error.hpp"

namespace panelfuse {

using Index = Eigen::Index;

/// Shape of a complete N x T panel with P coefficients per cell
/// (P counts the intercept slot). Cells are stored individual-major:
/// cell(i, t) = i * T + t, all indices 0-based internally.
struct PanelShape {
    Index n_individuals = 0;
    Index n_periods = 0;
    Index n_covariates = 0;

    Index n_cells() const { return n_individuals * n_periods; }
    Index cell(Index i, Index t) const { return i * n_periods + t; }
    Index individual_of(Index c) const { return c / n_periods; }
    Index period_of(Index c) const { return c % n_periods; }
    bool operator==(const PanelShape&) const = default;
};

/// Observed outcomes y_it and regressors z_it on a complete lattice.
class PanelData {
public:
    /// `outcomes` has N*T entries; `regressors` is (P-1) x (N*T), one column per cell.
    PanelData(Index n_individuals, Index n_periods, Eigen::VectorXd outcomes,
              Eigen::MatrixXd regressors);

    const PanelShape& shape() const { return shape_; }
    Index n_individuals() const { return shape_.n_individuals; }
    Index n_periods() const { return shape_.n_periods; }
    Index n_covariates() const { return shape_.n_covariates; }

    const Eigen::VectorXd& outcomes() const { return y_; }
    const Eigen::MatrixXd& regressors() const { return z_; }
    double y(Index i, Index t) const { return y_(shape_.cell(i, t)); }

    bool operator==(const PanelData& o) const {
        return shape_ == o.shape_ && y_ == o.y_ && z_ == o.z_;
    }

private:
    PanelShape shape_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd z_;
};

/// x_it = (1, z_it), stored P x (N*T).
struct DesignMatrix {
    PanelShape shape;
    Eigen::MatrixXd rows;

    auto x(Index c) const { return rows.col(c); }
    auto x(Index i, Index t) const { return rows.col(shape.cell(i, t)); }
};

/// Heterogeneous coefficients beta_it; slot 0 is the fixed effect mu_it.
struct CoefficientField {
    PanelShape shape;
    Eigen::MatrixXd values;  // P x (N*T)

    CoefficientField() = default;
    explicit CoefficientField(const PanelShape& s)
        : shape(s), values(Eigen::MatrixXd::Zero(s.n_covariates, s.n_cells())) {}
    CoefficientField(const PanelShape& s, Eigen::MatrixXd v);

    auto at(Index i, Index t) { return values.col(shape.cell(i, t)); }
    auto at(Index i, Index t) const { return values.col(shape.cell(i, t)); }

    Eigen::Map<Eigen::VectorXd> flat() { return {values.data(), values.size()}; }
    Eigen::Map<const Eigen::VectorXd> flat() const { return {values.data(), values.size()}; }
};

struct IndividualPair {
    Index i, j, t;
};

struct PeriodPair {
    Index i, t, t2;
};

/// Pairwise difference index sets standing in for the fusion matrices.
/// Both lists are lexicographically ordered on their tuples.
struct FusionIndex {
    Index n_individuals = 0;
    Index n_periods = 0;
    std::vector<IndividualPair> individual_pairs;  // (i, j, t), i < j
    std::vector<PeriodPair> period_pairs;          // (i, t, t'), t < t'
};

/// Mutually exclusive, exhaustive assignment of lattice cells to blocks.
/// Labels are 0-based internally; external output adds one.
class BlockPartition {
public:
    BlockPartition() = default;
    BlockPartition(const PanelShape& shape, std::vector<Index> assignment,
                   Eigen::MatrixXd block_values);

    const PanelShape& shape() const { return shape_; }
    Index n_blocks() const { return block_values_.cols(); }
    Index label(Index c) const { return assignment_[static_cast<std::size_t>(c)]; }
    Index label(Index i, Index t) const { return label(shape_.cell(i, t)); }
    const std::vector<Index>& assignment() const { return assignment_; }
    /// P x L, column l holds alpha_l.
    const Eigen::MatrixXd& block_values() const { return block_values_; }
    std::vector<Index> block_sizes() const;
    /// Cells of each block, ascending.
    std::vector<std::vector<Index>> members() const;
    /// beta_it = alpha_{label(i,t)}.
    CoefficientField expand() const;

private:
    PanelShape shape_;
    std::vector<Index> assignment_;
    Eigen::MatrixXd block_values_;
};

DesignMatrix build_design(const PanelData& panel);

FusionIndex build_fusion_index(Index n_individuals, Index n_periods);

struct FusedDifferences {
    Eigen::MatrixXd individual;  // P x |individual_pairs|
    Eigen::MatrixXd period;      // P x |period_pairs|
};

FusedDifferences fused_differences(const CoefficientField& beta, const FusionIndex& idx);

}  // namespace panelfuse
