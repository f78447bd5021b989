#pragma once

#include <span>

#include "panelfuse/panel.hpp"

namespace panelfuse {

struct RmseBias {
    double rmse = 0.0;
    double bias = 0.0;
};

/// Root mean squared and mean signed entrywise error over all N*T*P entries.
RmseBias rmse_bias(const CoefficientField& estimate, const CoefficientField& truth);

/// Fraction of replicates whose estimated block count equals `true_blocks`.
double percent_correct_L(std::span<const Index> l_hats, Index true_blocks);

struct RandIndexScore {
    double eri = 0.0;    // (eri_t + eri_n) / 2
    double eri_t = 0.0;  // mean over periods of the Rand index across individuals
    double eri_n = 0.0;  // mean over individuals of the Rand index across periods
};

/// Classical pair-counting Rand index between two labelings of the same items.
double rand_index(std::span<const Index> a, std::span<const Index> b);

/// Per-slice Rand indices of the two partitions, averaged by axis.
RandIndexScore extended_rand_index(const BlockPartition& estimate, const BlockPartition& truth);

struct ReplicateScore {
    double rmse = 0.0;
    double bias = 0.0;
    Index l_hat = 0;
    double eri = 0.0;
    double eri_t = 0.0;
    double eri_n = 0.0;
};

}  // namespace panelfuse
