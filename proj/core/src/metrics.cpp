#include "panelfuse/metrics.hpp"

#include <cmath>
#include <vector>

#include "panelfuse/error.hpp"

namespace panelfuse {

RmseBias rmse_bias(const CoefficientField& estimate, const CoefficientField& truth) {
    if (!(estimate.shape == truth.shape) || estimate.values.rows() != truth.values.rows() ||
        estimate.values.cols() != truth.values.cols()) {
        throw InvalidArgument("coefficient fields differ in shape");
    }
    const Eigen::ArrayXXd gap = estimate.values.array() - truth.values.array();
    const double n = static_cast<double>(gap.size());
    return {std::sqrt(gap.square().sum() / n), gap.sum() / n};
}

double percent_correct_L(std::span<const Index> l_hats, Index true_blocks) {
    if (l_hats.empty()) throw InvalidArgument("no replicates to score");
    std::size_t hits = 0;
    for (Index l : l_hats) hits += (l == true_blocks) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(l_hats.size());
}

double rand_index(std::span<const Index> a, std::span<const Index> b) {
    if (a.size() != b.size()) throw InvalidArgument("labelings differ in length");
    if (a.size() < 2) throw InvalidArgument("Rand index needs at least two items");
    std::size_t agree = 0, total = 0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        for (std::size_t y = x + 1; y < a.size(); ++y) {
            agree += ((a[x] == a[y]) == (b[x] == b[y])) ? 1 : 0;
            ++total;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(total);
}

RandIndexScore extended_rand_index(const BlockPartition& estimate, const BlockPartition& truth) {
    const auto& shape = truth.shape();
    if (!(estimate.shape().n_individuals == shape.n_individuals &&
          estimate.shape().n_periods == shape.n_periods)) {
        throw InvalidArgument("partitions cover different lattices");
    }
    const Index n = shape.n_individuals;
    const Index tc = shape.n_periods;
    if (n < 2 || tc < 2) throw InvalidArgument("Rand index undefined on slices of one cell");

    RandIndexScore s;
    std::vector<Index> ea(static_cast<std::size_t>(n)), ta(static_cast<std::size_t>(n));
    for (Index t = 0; t < tc; ++t) {
        for (Index i = 0; i < n; ++i) {
            ea[static_cast<std::size_t>(i)] = estimate.label(i, t);
            ta[static_cast<std::size_t>(i)] = truth.label(i, t);
        }
        s.eri_t += rand_index(ea, ta);
    }
    s.eri_t /= static_cast<double>(tc);

    std::vector<Index> eb(static_cast<std::size_t>(tc)), tb(static_cast<std::size_t>(tc));
    for (Index i = 0; i < n; ++i) {
        for (Index t = 0; t < tc; ++t) {
            eb[static_cast<std::size_t>(t)] = estimate.label(i, t);
            tb[static_cast<std::size_t>(t)] = truth.label(i, t);
        }
        s.eri_n += rand_index(eb, tb);
    }
    s.eri_n /= static_cast<double>(n);
    s.eri = 0.5 * (s.eri_t + s.eri_n);
    return s;
}

}  // namespace panelfuse
