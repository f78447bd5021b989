#include "panelfuse/simulation.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "panelfuse/error.hpp"
#include "panelfuse/random.hpp"

namespace panelfuse {

namespace {

enum Stream : std::uint64_t { kRegressor = 1, kOutcomeError = 2, kAssignment = 3 };

// Relabels raw block ids by first appearance in cell order.
BlockPartition make_partition(const PanelShape& shape, const std::vector<Index>& raw,
                              const Eigen::MatrixXd& raw_values) {
    std::vector<Index> relabel(static_cast<std::size_t>(raw_values.cols()), -1);
    std::vector<Index> assignment(raw.size());
    Index next = 0;
    for (std::size_t c = 0; c < raw.size(); ++c) {
        auto& l = relabel[static_cast<std::size_t>(raw[c])];
        if (l < 0) l = next++;
        assignment[c] = l;
    }
    Eigen::MatrixXd values(raw_values.rows(), next);
    for (Index b = 0; b < raw_values.cols(); ++b) {
        const Index l = relabel[static_cast<std::size_t>(b)];
        if (l >= 0) values.col(l) = raw_values.col(b);
    }
    return {shape, std::move(assignment), std::move(values)};
}

}  // namespace

void ErrorSpec::validate() const {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidArgument(kind == Kind::Homoscedastic ? "sigma2 must be positive"
                                                          : "tau must be positive");
    }
}

double error_scale(double x, const ErrorSpec& spec) {
    if (spec.kind == ErrorSpec::Kind::Homoscedastic) return std::sqrt(spec.value);
    return spec.value * std::sqrt(0.05 + 0.05 * x * x);
}

Eigen::VectorXd gen_errors(const Eigen::VectorXd& x, const ErrorSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    Eigen::VectorXd e(x.size());
    for (Index k = 0; k < x.size(); ++k) e(k) = error_scale(x(k), spec) * rng.normal();
    return e;
}

SimulatedInstance simulate_from_truth(const BlockPartition& truth, const ErrorSpec& err,
                                      std::uint64_t seed) {
    err.validate();
    const auto& shape = truth.shape();
    if (shape.n_covariates != 2) {
        throw InvalidArgument("simulated designs carry an intercept and one regressor (P = 2)");
    }
    CoefficientField beta = truth.expand();
    const Rng root(seed);
    Rng shocks = root.split(kRegressor);
    Eigen::MatrixXd z(1, shape.n_cells());
    for (Index c = 0; c < shape.n_cells(); ++c) z(0, c) = 1.0 + 0.5 * beta.values(0, c) + shocks.normal();
    const Eigen::VectorXd x = z.row(0).transpose();
    const Eigen::VectorXd e = gen_errors(x, err, root.split(kOutcomeError).seed());
    Eigen::VectorXd y(shape.n_cells());
    for (Index c = 0; c < shape.n_cells(); ++c) {
        y(c) = beta.values(0, c) + x(c) * beta.values(1, c) + e(c);
    }
    return {PanelData(shape.n_individuals, shape.n_periods, std::move(y), std::move(z)), truth,
            std::move(beta), seed};
}

SimulatedInstance gen_dgp1(Index n_individuals, Index n_periods, const ErrorSpec& err,
                           std::uint64_t seed) {
    if (n_individuals < 4 || n_individuals % 4 != 0) {
        throw InvalidArgument("DGP1 needs N to be a positive multiple of 4 (got " +
                              std::to_string(n_individuals) + ")");
    }
    if (n_periods < 10) {
        throw InvalidArgument("DGP1 needs T >= 10 (got " + std::to_string(n_periods) + ")");
    }
    const PanelShape shape{n_individuals, n_periods, 2};
    const Index quarter = n_individuals / 4;
    auto frac = [&](Index num) { return num * n_periods / 40; };
    const Index g2_begin = frac(19), g2_end = frac(29);
    const Index g3_begin = frac(9), g3_end = frac(34);

    std::vector<Index> raw(static_cast<std::size_t>(shape.n_cells()), 0);
    for (Index i = quarter; i < 3 * quarter; ++i) {
        const bool second = i < 2 * quarter;
        const Index begin = second ? g2_begin : g3_begin;
        const Index end = second ? g2_end : g3_end;
        for (Index t = begin; t < end; ++t) raw[static_cast<std::size_t>(shape.cell(i, t))] = 1;
    }
    Eigen::MatrixXd alpha(2, 2);
    alpha << -2.0, 2.0,  //
        3.0, 5.0;
    return simulate_from_truth(make_partition(shape, raw, alpha), err, seed);
}

SimulatedInstance gen_dgp2(Index n_individuals, Index n_periods, const ErrorSpec& err,
                           std::uint64_t seed) {
    if (n_individuals < 10 || n_individuals % 10 != 0) {
        throw InvalidArgument("DGP2 needs N to be a positive multiple of 10 (got " +
                              std::to_string(n_individuals) + ")");
    }
    if (n_periods < 2) throw InvalidArgument("DGP2 needs T >= 2");
    const PanelShape shape{n_individuals, n_periods, 2};

    std::vector<Index> group(static_cast<std::size_t>(n_individuals));
    const Index n1 = 3 * n_individuals / 10, n2 = 3 * n_individuals / 10;
    for (Index i = 0; i < n_individuals; ++i) group[static_cast<std::size_t>(i)] = i < n1 ? 0 : (i < n1 + n2 ? 1 : 2);
    Rng rng = Rng(seed).split(kAssignment);
    for (std::size_t k = group.size() - 1; k > 0; --k) {
        std::swap(group[k], group[rng.below(k + 1)]);
    }

    std::vector<Index> raw(static_cast<std::size_t>(shape.n_cells()));
    for (Index i = 0; i < n_individuals; ++i) {
        for (Index t = 0; t < n_periods; ++t) {
            raw[static_cast<std::size_t>(shape.cell(i, t))] = group[static_cast<std::size_t>(i)];
        }
    }
    Eigen::MatrixXd alpha(2, 3);
    alpha << -2.0, 2.0, 6.0,  //
        3.0, 6.0, -1.0;
    return simulate_from_truth(make_partition(shape, raw, alpha), err, seed);
}

SimulatedInstance generate(std::string_view dgp, Index n_individuals, Index n_periods,
                           const ErrorSpec& err, std::uint64_t seed) {
    if (dgp == "dgp1") return gen_dgp1(n_individuals, n_periods, err, seed);
    if (dgp == "dgp2") return gen_dgp2(n_individuals, n_periods, err, seed);
    throw InvalidArgument("unknown design '" + std::string(dgp) + "' (dgp1|dgp2)");
}

}  // namespace panelfuse
