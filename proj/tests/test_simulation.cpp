#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"

using namespace panelfuse;

namespace {

// Cells of the smaller DGP1 block, 1-based, read off the listed sets at N = T = 40.
std::set<std::pair<int, int>> listed_block_two() {
    std::set<std::pair<int, int>> out;
    for (int i = 11; i <= 20; ++i) {
        for (int t = 20; t <= 29; ++t) out.insert({i, t});
    }
    for (int i = 21; i <= 30; ++i) {
        for (int t = 10; t <= 34; ++t) out.insert({i, t});
    }
    return out;
}

}  // namespace

TEST_CASE("DGP1 at N = T = 40 reproduces the listed memberships") {
    const auto inst = gen_dgp1(40, 40, ErrorSpec::homoscedastic(0.5), 1);
    REQUIRE(inst.truth.n_blocks() == 2);
    const auto two = listed_block_two();
    const Index label_one = inst.truth.label(0, 0);
    for (int i = 1; i <= 40; ++i) {
        for (int t = 1; t <= 40; ++t) {
            const bool in_two = two.count({i, t}) > 0;
            CHECK((inst.truth.label(i - 1, t - 1) != label_one) == in_two);
        }
    }
    const auto sizes = inst.truth.block_sizes();
    CHECK(sizes[static_cast<std::size_t>(label_one)] == 1600 - 350);
    CHECK(sizes[static_cast<std::size_t>(1 - label_one)] == 350);
    CHECK(inst.truth.block_values().col(label_one) == Eigen::Vector2d(-2, 3));
    CHECK(inst.truth.block_values().col(1 - label_one) == Eigen::Vector2d(2, 5));
}

TEST_CASE("DGP1 scaled sizes and validation") {
    for (Index n : {8, 20, 40}) {
        for (Index t : {10, 20, 33}) {
            const auto inst = gen_dgp1(n, t, ErrorSpec::homoscedastic(1.0), 5);
            CHECK(inst.truth.n_blocks() == 2);
            // first and last quarters never leave block one
            for (Index tt = 0; tt < t; ++tt) {
                CHECK(inst.truth.label(0, tt) == inst.truth.label(n - 1, tt));
            }
        }
    }
    CHECK_THROWS_AS(gen_dgp1(10, 20, ErrorSpec::homoscedastic(1.0), 1), InvalidArgument);
    CHECK_THROWS_AS(gen_dgp1(20, 8, ErrorSpec::homoscedastic(1.0), 1), InvalidArgument);
}

TEST_CASE("DGP1 noiseless limit") {
    const auto inst = gen_dgp1(20, 20, ErrorSpec::homoscedastic(1e-12), 9);
    const auto design = build_design(inst.panel);
    for (Index c = 0; c < inst.panel.shape().n_cells(); ++c) {
        const double signal = design.x(c).dot(inst.true_beta.values.col(c));
        CHECK(std::abs(inst.panel.outcomes()(c) - signal) < 1e-5);
    }
}

TEST_CASE("DGP2 groups") {
    const auto inst = gen_dgp2(20, 7, ErrorSpec::homoscedastic(0.5), 3);
    REQUIRE(inst.truth.n_blocks() == 3);
    std::vector<Index> sizes = inst.truth.block_sizes();
    for (auto& s : sizes) s /= 7;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes == std::vector<Index>{6, 6, 8});
    for (Index i = 0; i < 20; ++i) {
        for (Index t = 1; t < 7; ++t) CHECK(inst.truth.label(i, t) == inst.truth.label(i, 0));
    }
    std::set<std::pair<double, double>> alphas;
    for (Index l = 0; l < 3; ++l) {
        alphas.insert({inst.truth.block_values()(0, l), inst.truth.block_values()(1, l)});
    }
    CHECK(alphas == std::set<std::pair<double, double>>{{-2, 3}, {2, 6}, {6, -1}});
    CHECK_THROWS_AS(gen_dgp2(15, 5, ErrorSpec::homoscedastic(1.0), 1), InvalidArgument);
}

TEST_CASE("instances are deterministic and seed-dependent") {
    for (const char* dgp : {"dgp1", "dgp2"}) {
        const auto a = generate(dgp, 20, 12, ErrorSpec::heteroscedastic(1.0), 42);
        const auto b = generate(dgp, 20, 12, ErrorSpec::heteroscedastic(1.0), 42);
        const auto c = generate(dgp, 20, 12, ErrorSpec::heteroscedastic(1.0), 43);
        CHECK(a.panel == b.panel);
        CHECK(a.truth.assignment() == b.truth.assignment());
        CHECK_FALSE(a.panel == c.panel);
        // truth and true_beta agree
        CHECK(a.truth.expand().values == a.true_beta.values);
    }
    const auto d1 = gen_dgp2(30, 4, ErrorSpec::homoscedastic(1.0), 1);
    const auto d2 = gen_dgp2(30, 4, ErrorSpec::homoscedastic(1.0), 2);
    CHECK(d1.truth.assignment() != d2.truth.assignment());
    CHECK_THROWS_AS(generate("dgp3", 20, 20, ErrorSpec::homoscedastic(1.0), 1), InvalidArgument);
}

TEST_CASE("error generation") {
    CHECK(error_scale(1.0, ErrorSpec::heteroscedastic(2.0)) == doctest::Approx(2.0 * std::sqrt(0.1)));
    CHECK(error_scale(1.0, ErrorSpec::heteroscedastic(2.0)) == doctest::Approx(0.63246).epsilon(1e-5));
    CHECK(error_scale(5.0, ErrorSpec::homoscedastic(0.25)) == 0.5);

    const Eigen::VectorXd x = Eigen::VectorXd::Zero(1000000);
    const Eigen::VectorXd e = gen_errors(x, ErrorSpec::homoscedastic(1.0), 2024);
    const double mean = e.mean();
    const double var = (e.array() - mean).square().sum() / static_cast<double>(e.size() - 1);
    CHECK(std::abs(var - 1.0) < 0.01);
    CHECK(std::abs(mean) < 0.01);

    CHECK_THROWS_AS(gen_errors(x.head(3), ErrorSpec::heteroscedastic(0.0), 1), InvalidArgument);
    CHECK_THROWS_AS(gen_errors(x.head(3), ErrorSpec::homoscedastic(-1.0), 1), InvalidArgument);
}

TEST_CASE("random generator") {
    Rng a(7);
    Rng b(7);
    for (int k = 0; k < 100; ++k) CHECK(a.normal() == b.normal());
    Rng s1 = Rng(7).split(1);
    Rng s2 = Rng(7).split(2);
    CHECK(s1.uniform() != s2.uniform());
    CHECK(Rng(7).split(1).seed() == Rng(7).split(1).seed());
    Rng c(3);
    for (int k = 0; k < 1000; ++k) {
        const double u = c.uniform();
        CHECK((u >= 0.0 && u < 1.0));
        CHECK(c.below(5) < 5);
    }
}
