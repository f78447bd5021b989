#include <doctest.h>

#include <random>

#include "oracles.hpp"

using namespace panelfuse;

TEST_CASE("panel data validates shape and finiteness") {
    CHECK_THROWS_AS(PanelData(1, 3, Eigen::VectorXd::Zero(3), Eigen::MatrixXd(0, 3)), InvalidArgument);
    CHECK_THROWS_AS(PanelData(2, 2, Eigen::VectorXd::Zero(3), Eigen::MatrixXd(0, 4)), InvalidArgument);
    CHECK_THROWS_AS(PanelData(2, 2, Eigen::VectorXd::Zero(4), Eigen::MatrixXd(1, 3)), InvalidArgument);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(4);
    y(2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(PanelData(2, 2, y, Eigen::MatrixXd(0, 4)), InvalidArgument);
    const PanelData ok(2, 3, Eigen::VectorXd::Ones(6), Eigen::MatrixXd::Zero(2, 6));
    CHECK(ok.n_covariates() == 3);
}

TEST_CASE("design prepends the intercept") {
    SUBCASE("intercept only") {
        const PanelData panel(2, 2, Eigen::VectorXd::Ones(4), Eigen::MatrixXd(0, 4));
        const auto d = build_design(panel);
        CHECK(d.rows.rows() == 1);
        CHECK(d.rows.isOnes());
    }
    SUBCASE("zero regressor") {
        const PanelData panel(2, 2, Eigen::VectorXd::Ones(4), Eigen::MatrixXd::Zero(1, 4));
        const auto d = build_design(panel);
        for (Index c = 0; c < 4; ++c) {
            CHECK(d.x(c)(0) == 1.0);
            CHECK(d.x(c)(1) == 0.0);
        }
    }
    SUBCASE("value lands in its cell") {
        Eigen::MatrixXd z = Eigen::MatrixXd::Zero(1, 4);
        z(0, 0) = 3.5;
        const PanelData panel(2, 2, Eigen::VectorXd::Ones(4), z);
        const auto d = build_design(panel);
        CHECK(d.x(0, 0)(0) == 1.0);
        CHECK(d.x(0, 0)(1) == 3.5);
    }
}

TEST_CASE("fusion index counts and order") {
    const auto small = build_fusion_index(3, 2);
    CHECK(small.individual_pairs.size() == 6);
    CHECK(small.period_pairs.size() == 3);

    const auto two = build_fusion_index(2, 2);
    REQUIRE(two.individual_pairs.size() == 2);
    CHECK(two.individual_pairs[0].i == 0);
    CHECK(two.individual_pairs[0].j == 1);
    CHECK(two.individual_pairs[0].t == 0);
    CHECK(two.individual_pairs[1].t == 1);
    REQUIRE(two.period_pairs.size() == 2);
    CHECK(two.period_pairs[0].i == 0);
    CHECK(two.period_pairs[0].t == 0);
    CHECK(two.period_pairs[0].t2 == 1);
    CHECK(two.period_pairs[1].i == 1);

    const auto big = build_fusion_index(20, 20);
    CHECK(big.individual_pairs.size() == 3800);
    CHECK(big.period_pairs.size() == 3800);

    CHECK_THROWS_AS(build_fusion_index(1, 5), InvalidArgument);
    CHECK_THROWS_AS(build_fusion_index(5, 1), InvalidArgument);
}

TEST_CASE("fusion index counts match the closed forms for 2 <= N, T <= 10") {
    for (Index n = 2; n <= 10; ++n) {
        for (Index t = 2; t <= 10; ++t) {
            const auto idx = build_fusion_index(n, t);
            CHECK(static_cast<Index>(idx.individual_pairs.size()) == t * n * (n - 1) / 2);
            CHECK(static_cast<Index>(idx.period_pairs.size()) == n * t * (t - 1) / 2);
            const bool sorted_ind = std::is_sorted(
                idx.individual_pairs.begin(), idx.individual_pairs.end(), [](auto& a, auto& b) {
                    return std::tie(a.i, a.j, a.t) < std::tie(b.i, b.j, b.t);
                });
            const bool sorted_per = std::is_sorted(
                idx.period_pairs.begin(), idx.period_pairs.end(), [](auto& a, auto& b) {
                    return std::tie(a.i, a.t, a.t2) < std::tie(b.i, b.t, b.t2);
                });
            CHECK(sorted_ind);
            CHECK(sorted_per);
        }
    }
}

TEST_CASE("fused differences") {
    SUBCASE("constant field") {
        const PanelShape shape{4, 3, 2};
        CoefficientField beta(shape);
        beta.values.row(0).setConstant(1.5);
        beta.values.row(1).setConstant(-0.25);
        const auto d = fused_differences(beta, build_fusion_index(4, 3));
        CHECK(d.individual.isZero(0.0));
        CHECK(d.period.isZero(0.0));
    }
    SUBCASE("direct subtraction") {
        const PanelShape shape{2, 2, 2};
        CoefficientField beta(shape);
        beta.at(0, 0) << 1.0, 0.0;
        beta.at(1, 0) << 0.0, 1.0;
        const auto d = fused_differences(beta, build_fusion_index(2, 2));
        CHECK(d.individual(0, 0) == 1.0);
        CHECK(d.individual(1, 0) == -1.0);
    }
    SUBCASE("brute force over all pairs, antisymmetric") {
        std::mt19937_64 gen(11);
        const PanelShape shape{3, 3, 2};
        const CoefficientField beta(shape, oracle::random_matrix(2, 9, gen));
        const auto idx = build_fusion_index(3, 3);
        const auto d = fused_differences(beta, idx);
        Index k = 0;
        for (Index i = 0; i < 3; ++i) {
            for (Index j = i + 1; j < 3; ++j) {
                for (Index t = 0; t < 3; ++t) {
                    const Eigen::Vector2d fwd = beta.at(i, t) - beta.at(j, t);
                    const Eigen::Vector2d back = beta.at(j, t) - beta.at(i, t);
                    CHECK((d.individual.col(k) - fwd).norm() == 0.0);
                    CHECK((d.individual.col(k) + back).norm() == 0.0);
                    ++k;
                }
            }
        }
        k = 0;
        for (Index i = 0; i < 3; ++i) {
            for (Index t = 0; t < 3; ++t) {
                for (Index s = t + 1; s < 3; ++s) {
                    CHECK((d.period.col(k) - (beta.at(i, t) - beta.at(i, s))).norm() == 0.0);
                    ++k;
                }
            }
        }
    }
}

TEST_CASE("block partition invariants") {
    const PanelShape shape{2, 2, 1};
    CHECK_THROWS_AS(BlockPartition(shape, {0, 0, 2, 2}, Eigen::MatrixXd::Zero(1, 3)), InvalidArgument);
    CHECK_THROWS_AS(BlockPartition(shape, {0, 0, 1}, Eigen::MatrixXd::Zero(1, 2)), InvalidArgument);
    CHECK_THROWS_AS(BlockPartition(shape, {0, 0, 1, 1}, Eigen::MatrixXd::Zero(2, 2)), InvalidArgument);
    Eigen::MatrixXd v(1, 2);
    v << 3.0, -1.0;
    const BlockPartition part(shape, {0, 1, 1, 0}, v);
    CHECK(part.n_blocks() == 2);
    CHECK(part.block_sizes() == std::vector<Index>{2, 2});
    const auto field = part.expand();
    CHECK(field.values(0, 0) == 3.0);
    CHECK(field.values(0, 1) == -1.0);
    CHECK(part.members()[1] == std::vector<Index>{1, 2});
}
