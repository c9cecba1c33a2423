#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

namespace {

CauchySolution cauchy_net(std::uint64_t seed, int size = 6) { return solve_cauchy(random_cauchy_data(seed, size, size)); }

}  // namespace

TEST(Tangency, MapsProduceTangentPairs) {
    auto n = random_net(3, 5, 5);
    auto p = propagate_quadrics(n, 0, 0, 1.2);
    auto l = frame_l(n, 1, 1);
    auto m = frame_m(n, 1, 1);
    auto q = make_quadric(n, p, 1, 1);
    auto s1 = mobius_map(MapKind::S1, l, p(1, 1)), t1 = mobius_map(MapKind::T1, l, p(1, 1));
    auto s2 = mobius_map(MapKind::S2, m, p(1, 1)), t2 = mobius_map(MapKind::T2, m, p(1, 1));
    for (auto [s, t] : {std::pair{0.4, -1.1}, std::pair{2.5, 0.3}, std::pair{-0.7, 1.9}}) {
        auto g = GenParam<double>::affine(s, t);
        auto [a, b] = tangency_residual(q, make_quadric(n, p, 2, 1), g, GenParam<double>{*apply(s1, g.s), *apply(t1, g.t)});
        EXPECT_LT(a, 1e-12);
        EXPECT_LT(b, 1e-12);
        auto [c, d] = tangency_residual(q, make_quadric(n, p, 1, 2), g, GenParam<double>{*apply(s2, g.s), *apply(t2, g.t)});
        EXPECT_LT(c, 1e-12);
        EXPECT_LT(d, 1e-12);
    }
}

TEST(Tangency, KeyIdentityHoldsOnEveryNet) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto n = random_net(s, 5, 5);
        auto p = propagate_quadrics(n, 0, 0, 0.9);
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j) EXPECT_LT(keydisc_residual(n, p, i, j), 1e-9);
    }
}

TEST(Tangency, KeyIdentityIsExactInRationalMode) {
    auto n = random_net_rational(2, 4, 4);
    auto p = propagate_quadrics(n, 0, 0, Rational(2));
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) EXPECT_EQ(local_pm(n, p, i, j).keydisc, 0);
}

TEST(Tangency, GenericNetsAreNotProjectiveMinimal) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto n = random_net(s, 5, 5);
        auto p = propagate_quadrics(n, 0, 0, 1.0);
        EXPECT_GT(fixtures::max_pm_maps(n, p), 1e-4);
        EXPECT_FALSE(pm_residual_gauge(n, p).pm_gauge);
    }
}

TEST(Tangency, CauchyNetsCloseInBothFormulations) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto sol = cauchy_net(s);
        EXPECT_LT(fixtures::max_pm_maps(sol.net, sol.p), 1e-8);
        auto rep = pm_residual_gauge(sol.net, sol.p);
        EXPECT_TRUE(rep.pm_gauge);
        EXPECT_TRUE(rep.pm_maps);
        EXPECT_LT(rep.max_keydisc, 1e-9);
    }
}

TEST(Tangency, NormalizingGaugeMatchesTheLocalDifferences) {
    int compared = 0;
    for (std::uint64_t s = 0; s < 10 && compared < 3; ++s) {
        auto sol = cauchy_net(s, 5);
        auto rep = pm_residual_gauge(sol.net, sol.p);
        if (!rep.gauge_real) continue;
        auto ng = apply_gauge(sol.net, rep.gauge);
        auto pg = gauge_face_field(sol.p, rep.gauge);
        for (int i = 0; i + 2 < ng.rows; ++i)
            for (int j = 0; j + 2 < ng.cols; ++j) {
                auto l = frame_l(ng, i, j);
                auto m = frame_m(ng, i, j);
                double pp = pg(i, j);
                EXPECT_NEAR((1 - pp * pp) * l.b2 * m.d1 / (l.b1 * m.d2), 1.0, 1e-8);
                auto [d1, d2] = delta_t_in_gauge(ng, pg, i, j);
                EXPECT_LT(d1, 1e-8);
                EXPECT_LT(d2, 1e-8);
            }
        ++compared;
    }
    EXPECT_GT(compared, 0);
}
