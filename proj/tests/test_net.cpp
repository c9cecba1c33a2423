#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

TEST(Net, RandomNetsHavePlanarStars) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto n = random_net(s, 6, 7);
        auto v = validate_asymptotic(n);
        EXPECT_TRUE(v.passed) << v.message;
        EXPECT_LT(v.max_planarity, 1e-12);
    }
}

TEST(Net, CorruptedVertexIsReported) {
    auto n = random_net(4, 5, 5);
    n(2, 3)[1] += 1e-3;
    auto v = validate_asymptotic(n);
    EXPECT_FALSE(v.passed);
    ASSERT_FALSE(v.nonplanar.empty());
    EXPECT_NE(v.message.find("non-planar"), std::string::npos);
}

TEST(Net, CompatibilityIdentityHolds) {
    for (std::uint64_t s = 0; s < 10; ++s) EXPECT_LT(fixtures::max_gmc(random_net(s, 5, 5)), 1e-10);
}

TEST(Net, CompatibilityIdentityIsExactInRationalMode) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto n = random_net_rational(s, 4, 4);
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j)
                for (auto& row : gmc_residual(n, i, j))
                    for (auto& x : row) EXPECT_EQ(x, 0);
    }
}

TEST(Net, FrameReproducesTheShiftedVertices) {
    auto n = random_net(2, 5, 5);
    auto l = frame_l(n, 1, 1);
    HomPoint<double> r11 = l.a0 * n(1, 1) + l.a1 * n(2, 1) + l.a3 * n(2, 2);
    HomPoint<double> r112 = l.b1 * n(2, 1) + l.b2 * n(1, 2) + l.b3 * n(2, 2);
    EXPECT_LT(proportionality_residual(r11.c, n(3, 1).c), 1e-12);
    EXPECT_LT(proportionality_residual(r112.c, n(3, 2).c), 1e-12);
    auto m = frame_m(n, 1, 1);
    HomPoint<double> r22 = m.g0 * n(1, 1) + m.g2 * n(1, 2) + m.g3 * n(2, 2);
    EXPECT_LT(proportionality_residual(r22.c, n(1, 3).c), 1e-12);
}

TEST(Net, GaugeLeavesPointsAndStructureAlone) {
    auto n = random_net(9, 5, 5);
    auto x = fixtures::random_gauge(1, 5, 5);
    auto g = apply_gauge(n, x);
    for (std::size_t k = 0; k < n.v.size(); ++k) EXPECT_LT(proportionality_residual(n.v[k].c, g.v[k].c), 1e-15);
    EXPECT_TRUE(validate_asymptotic(g).passed);
    EXPECT_LT(fixtures::max_gmc(g), 1e-10);
    // a0 scales by x11/x, a1 by x11/x1.
    auto l = frame_l(n, 0, 0), lg = frame_l(g, 0, 0);
    EXPECT_NEAR(lg.a0, l.a0 * x(2, 0) / x(0, 0), 1e-9 * std::abs(lg.a0));
    EXPECT_NEAR(lg.a1, l.a1 * x(2, 0) / x(1, 0), 1e-9 * std::abs(lg.a1));
}

TEST(Net, TooSmallGridsAreRejected) {
    AsymptoticNet<double> n(2, 5);
    EXPECT_THROW(validate_asymptotic(n), std::invalid_argument);
}
