#include <doctest.h>

#include <map>
#include <random>

#include "oracles.hpp"

using namespace panelfuse;

TEST_CASE("rmse and bias") {
    const PanelShape shape{2, 2, 2};
    std::mt19937_64 gen(1);
    const CoefficientField truth(shape, oracle::random_matrix(2, 4, gen));
    const auto same = rmse_bias(truth, truth);
    CHECK(same.rmse == 0.0);
    CHECK(same.bias == 0.0);

    CoefficientField shifted = truth;
    shifted.values.array() += 1.0;
    const auto s = rmse_bias(shifted, truth);
    CHECK(s.rmse == doctest::Approx(1.0));
    CHECK(s.bias == doctest::Approx(1.0));

    const CoefficientField zero(PanelShape{2, 1, 1});
    const CoefficientField pm(PanelShape{2, 1, 1}, (Eigen::MatrixXd(1, 2) << 1.0, -1.0).finished());
    const auto h = rmse_bias(pm, zero);
    CHECK(h.rmse == doctest::Approx(1.0));
    CHECK(h.bias == doctest::Approx(0.0));

    CHECK_THROWS_AS(rmse_bias(truth, CoefficientField(PanelShape{2, 3, 2})), InvalidArgument);
}

TEST_CASE("rmse dominates the absolute bias") {
    std::mt19937_64 gen(2);
    for (int rep = 0; rep < 100; ++rep) {
        const PanelShape shape{3, 4, 2};
        const CoefficientField a(shape, oracle::random_matrix(2, 12, gen));
        const CoefficientField b(shape, oracle::random_matrix(2, 12, gen));
        const auto r = rmse_bias(a, b);
        CHECK(r.rmse >= std::abs(r.bias));
    }
}

TEST_CASE("percent correct L") {
    const std::vector<Index> all{3, 3, 3};
    CHECK(percent_correct_L(all, 3) == 1.0);
    CHECK(percent_correct_L(all, 2) == 0.0);
    std::vector<Index> hits(100, 2);
    for (int k = 0; k < 11; ++k) hits[static_cast<std::size_t>(k * 9)] = 3;
    CHECK(percent_correct_L(hits, 2) == doctest::Approx(0.89));
    CHECK_THROWS_AS(percent_correct_L(std::vector<Index>{}, 2), InvalidArgument);
}

TEST_CASE("Rand index") {
    const std::vector<Index> truth{0, 0, 1, 1};
    const std::vector<Index> singles{0, 1, 2, 3};
    CHECK(rand_index(truth, singles) == doctest::Approx(4.0 / 6.0));
    CHECK(rand_index(truth, truth) == 1.0);
    CHECK(rand_index(std::vector<Index>{5, 5, 5}, std::vector<Index>{0, 0, 0}) == 1.0);
    CHECK_THROWS_AS(rand_index(std::vector<Index>{0}, std::vector<Index>{0}), InvalidArgument);

    std::mt19937_64 gen(3);
    std::uniform_int_distribution<Index> lab(0, 3);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<Index> a(9), b(9);
        for (auto& v : a) v = lab(gen);
        for (auto& v : b) v = lab(gen);
        CHECK(rand_index(a, b) == doctest::Approx(oracle::rand_index(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("extended Rand index") {
    const PanelShape shape{4, 3, 1};
    // compacts arbitrary labels to 0..L-1 in order of first appearance
    const auto part = [&](const std::vector<Index>& labels) {
        std::map<Index, Index> dense;
        std::vector<Index> out;
        for (auto v : labels) out.push_back(dense.emplace(v, static_cast<Index>(dense.size())).first->second);
        return BlockPartition(shape, out, Eigen::MatrixXd::Zero(1, static_cast<Index>(dense.size())));
    };
    const auto truth = part({0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1});
    SUBCASE("perfect recovery") {
        const auto s = extended_rand_index(truth, truth);
        CHECK(s.eri == 1.0);
        CHECK(s.eri_t == 1.0);
        CHECK(s.eri_n == 1.0);
    }
    SUBCASE("trivial partitions agree") {
        const auto one = part(std::vector<Index>(12, 0));
        CHECK(extended_rand_index(one, one).eri == 1.0);
    }
    SUBCASE("singletons against two equal groups") {
        std::vector<Index> singles(12);
        for (Index c = 0; c < 12; ++c) singles[static_cast<std::size_t>(c)] = c;
        const auto s = extended_rand_index(part(singles), truth);
        CHECK(s.eri_t == doctest::Approx(4.0 / 6.0));
        CHECK(s.eri_n == doctest::Approx(0.0));
        CHECK(s.eri == doctest::Approx((s.eri_t + s.eri_n) / 2));
    }
    SUBCASE("slice oracle and label permutation invariance") {
        std::mt19937_64 gen(4);
        std::uniform_int_distribution<Index> lab(0, 3);
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<Index> a(12), b(12);
            for (auto& v : a) v = lab(gen);
            for (auto& v : b) v = lab(gen);
            const auto pa = part(a);
            const auto pb = part(b);
            double eri_t = 0;
            for (Index t = 0; t < 3; ++t) {
                std::vector<Index> sa, sb;
                for (Index i = 0; i < 4; ++i) {
                    sa.push_back(a[static_cast<std::size_t>(i * 3 + t)]);
                    sb.push_back(b[static_cast<std::size_t>(i * 3 + t)]);
                }
                eri_t += oracle::rand_index(sa, sb) / 3;
            }
            double eri_n = 0;
            for (Index i = 0; i < 4; ++i) {
                const std::vector<Index> sa(a.begin() + i * 3, a.begin() + i * 3 + 3);
                const std::vector<Index> sb(b.begin() + i * 3, b.begin() + i * 3 + 3);
                eri_n += oracle::rand_index(sa, sb) / 4;
            }
            const auto s = extended_rand_index(pa, pb);
            CHECK(s.eri_t == doctest::Approx(eri_t).epsilon(1e-14));
            CHECK(s.eri_n == doctest::Approx(eri_n).epsilon(1e-14));
            CHECK(s.eri >= 0.0);
            CHECK(s.eri <= 1.0);

            // reverse the dense labels of the estimate
            std::vector<Index> permuted = pa.assignment();
            for (auto& v : permuted) v = pa.n_blocks() - 1 - v;
            const BlockPartition pp(shape, permuted, Eigen::MatrixXd::Zero(1, pa.n_blocks()));
            CHECK(extended_rand_index(pp, pb).eri == doctest::Approx(s.eri).epsilon(1e-15));
        }
    }
    SUBCASE("lattice mismatch") {
        const BlockPartition other({3, 4, 1}, std::vector<Index>(12, 0), Eigen::MatrixXd::Zero(1, 1));
        CHECK_THROWS_AS(extended_rand_index(other, truth), InvalidArgument);
    }
}
