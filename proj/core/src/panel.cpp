#include "panelfuse/panel.hpp"

#include <string>

namespace panelfuse {

PanelData::PanelData(Index n_individuals, Index n_periods, Eigen::VectorXd outcomes,
                     Eigen::MatrixXd regressors)
    : y_(std::move(outcomes)), z_(std::move(regressors)) {
    if (n_individuals < 2 || n_periods < 2) {
        throw InvalidArgument("panel needs N >= 2 and T >= 2");
    }
    shape_ = {n_individuals, n_periods, z_.rows() + 1};
    const Index cells = shape_.n_cells();
    if (y_.size() != cells) {
        throw InvalidArgument("outcome vector has " + std::to_string(y_.size()) +
                              " entries, expected " + std::to_string(cells));
    }
    if (z_.rows() > 0 && z_.cols() != cells) {
        throw InvalidArgument("regressor matrix has " + std::to_string(z_.cols()) +
                              " columns, expected " + std::to_string(cells));
    }
    if (z_.rows() == 0) z_.resize(0, cells);
    if (!y_.allFinite() || !z_.allFinite()) {
        throw InvalidArgument("panel contains non-finite values");
    }
}

CoefficientField::CoefficientField(const PanelShape& s, Eigen::MatrixXd v)
    : shape(s), values(std::move(v)) {
    if (values.rows() != s.n_covariates || values.cols() != s.n_cells()) {
        throw InvalidArgument("coefficient field shape does not match panel");
    }
}

BlockPartition::BlockPartition(const PanelShape& shape, std::vector<Index> assignment,
                               Eigen::MatrixXd block_values)
    : shape_(shape), assignment_(std::move(assignment)), block_values_(std::move(block_values)) {
    if (static_cast<Index>(assignment_.size()) != shape_.n_cells()) {
        throw InvalidArgument("partition must assign every cell exactly once");
    }
    const Index n_blocks = block_values_.cols();
    if (n_blocks < 1 || block_values_.rows() != shape_.n_covariates) {
        throw InvalidArgument("partition block values have wrong shape");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n_blocks), false);
    for (Index l : assignment_) {
        if (l < 0 || l >= n_blocks) throw InvalidArgument("block label out of range");
        seen[static_cast<std::size_t>(l)] = true;
    }
    for (bool s : seen) {
        if (!s) throw InvalidArgument("block labels must be contiguous (empty block)");
    }
    if (!block_values_.allFinite()) throw InvalidArgument("non-finite block value");
}

std::vector<Index> BlockPartition::block_sizes() const {
    std::vector<Index> sizes(static_cast<std::size_t>(n_blocks()), 0);
    for (Index l : assignment_) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

std::vector<std::vector<Index>> BlockPartition::members() const {
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(n_blocks()));
    for (Index c = 0; c < shape_.n_cells(); ++c) {
        out[static_cast<std::size_t>(label(c))].push_back(c);
    }
    return out;
}

CoefficientField BlockPartition::expand() const {
    CoefficientField beta(shape_);
    for (Index c = 0; c < shape_.n_cells(); ++c) beta.values.col(c) = block_values_.col(label(c));
    return beta;
}

DesignMatrix build_design(const PanelData& panel) {
    const auto& s = panel.shape();
    DesignMatrix d{s, Eigen::MatrixXd(s.n_covariates, s.n_cells())};
    d.rows.row(0).setOnes();
    if (s.n_covariates > 1) d.rows.bottomRows(s.n_covariates - 1) = panel.regressors();
    return d;
}

FusionIndex build_fusion_index(Index n_individuals, Index n_periods) {
    if (n_individuals < 2 || n_periods < 2) {
        throw InvalidArgument("fusion index needs N >= 2 and T >= 2");
    }
    FusionIndex idx{n_individuals, n_periods, {}, {}};
    idx.individual_pairs.reserve(
        static_cast<std::size_t>(n_periods * n_individuals * (n_individuals - 1) / 2));
    for (Index i = 0; i < n_individuals; ++i)
        for (Index j = i + 1; j < n_individuals; ++j)
            for (Index t = 0; t < n_periods; ++t) idx.individual_pairs.push_back({i, j, t});

    idx.period_pairs.reserve(
        static_cast<std::size_t>(n_individuals * n_periods * (n_periods - 1) / 2));
    for (Index i = 0; i < n_individuals; ++i)
        for (Index t = 0; t < n_periods; ++t)
            for (Index t2 = t + 1; t2 < n_periods; ++t2) idx.period_pairs.push_back({i, t, t2});
    return idx;
}

FusedDifferences fused_differences(const CoefficientField& beta, const FusionIndex& idx) {
    const auto& s = beta.shape;
    if (s.n_individuals != idx.n_individuals || s.n_periods != idx.n_periods) {
        throw InvalidArgument("fusion index does not match coefficient field");
    }
    const Index p = s.n_covariates;
    FusedDifferences out{Eigen::MatrixXd(p, static_cast<Index>(idx.individual_pairs.size())),
                         Eigen::MatrixXd(p, static_cast<Index>(idx.period_pairs.size()))};
    Index k = 0;
    for (const auto& [i, j, t] : idx.individual_pairs) {
        out.individual.col(k++) = beta.at(i, t) - beta.at(j, t);
    }
    k = 0;
    for (const auto& [i, t, t2] : idx.period_pairs) {
        out.period.col(k++) = beta.at(i, t) - beta.at(i, t2);
    }
    return out;
}

}  // namespace panelfuse
