#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "panelfuse/panel.hpp"

namespace panelfuse {

/// Outcome error design: i.i.d. N(0, sigma2), or sigma_it * e_it with
/// sigma_it = tau * sqrt(0.05 + 0.05 x_it^2).
struct ErrorSpec {
    enum class Kind { Homoscedastic, Heteroscedastic };
    Kind kind = Kind::Homoscedastic;
    double value = 1.0;  // sigma2 or tau

    static ErrorSpec homoscedastic(double sigma2) { return {Kind::Homoscedastic, sigma2}; }
    static ErrorSpec heteroscedastic(double tau) { return {Kind::Heteroscedastic, tau}; }
    void validate() const;
};

struct SimulatedInstance {
    PanelData panel;
    BlockPartition truth;
    CoefficientField true_beta;
    std::uint64_t seed = 0;
};

/// Per-cell error standard deviation under `spec` for regressor value x.
double error_scale(double x, const ErrorSpec& spec);

/// One error draw per entry of x.
Eigen::VectorXd gen_errors(const Eigen::VectorXd& x, const ErrorSpec& spec, std::uint64_t seed);

/// Two-block irregular design. For N = T = 40: individuals 1-10 and 31-40 stay
/// in block 1; individuals 11-20 switch to block 2 in periods 20-29 and
/// individuals 21-30 in periods 10-34. Other sizes scale the individual
/// quarters and the period fractions [19/40, 29/40) and [9/40, 34/40),
/// boundaries rounded down. Requires N % 4 == 0 and T >= 10.
SimulatedInstance gen_dgp1(Index n_individuals, Index n_periods, const ErrorSpec& err,
                           std::uint64_t seed);

/// Three time-invariant groups in proportion 3:3:4, individuals assigned at
/// random. Requires N % 10 == 0.
SimulatedInstance gen_dgp2(Index n_individuals, Index n_periods, const ErrorSpec& err,
                           std::uint64_t seed);

SimulatedInstance generate(std::string_view dgp, Index n_individuals, Index n_periods,
                           const ErrorSpec& err, std::uint64_t seed);

/// Outcomes and regressors from a known coefficient field, x = 1 + 0.5 mu + N(0,1).
/// Shared by both designs; exposed for constructing custom block layouts.
SimulatedInstance simulate_from_truth(const BlockPartition& truth, const ErrorSpec& err,
                                      std::uint64_t seed);

}  // namespace panelfuse
