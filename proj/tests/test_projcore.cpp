#include <latticelie/projcore.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace latticelie;

namespace {

HomPoint<double> gaussian(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng), g(rng), g(rng)};
}

}  // namespace

TEST(Projcore, BracketOfBasisIsOne) {
    HomPoint<double> a(1, 0, 0, 0), b(0, 1, 0, 0), c(0, 0, 1, 0), d(0, 0, 0, 1);
    EXPECT_EQ(bracket(a, b, c, d), 1.0);
    EXPECT_EQ(bracket(b, a, c, d), -1.0);
}

TEST(Projcore, PluckerRelationAndIncidence) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        auto a = gaussian(rng), b = gaussian(rng);
        auto l = line_through(a, b);
        EXPECT_LT(std::abs(pairing(l, l)) / (norm(l) * norm(l)), 1e-14);
        EXPECT_LT(point_on_line_residual(l, a), 1e-13);
        EXPECT_LT(point_on_line_residual(l, HomPoint<double>(2.0 * a + -0.7 * b)), 1e-13);
        auto [u, v] = points_on_line(l);
        EXPECT_TRUE(lines_coincide(l, line_through(u, v)));
    }
}

TEST(Projcore, MeetingLinesIntersectAtCommonPoint) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        auto x = gaussian(rng), a = gaussian(rng), b = gaussian(rng);
        auto l = line_through(x, a), m = line_through(x, b);
        EXPECT_TRUE(lines_intersect(l, m));
        EXPECT_LT(proportionality_residual(intersect_lines(l, m).c, x.c), 1e-10);
        auto skew = line_through(gaussian(rng), gaussian(rng));
        EXPECT_GT(pairing_normalized(l, skew), 1e-6);
    }
}

TEST(Projcore, PlanesMeetInTheJoinLine) {
    std::mt19937_64 rng(8);
    auto a = gaussian(rng), b = gaussian(rng), c = gaussian(rng), d = gaussian(rng);
    auto l = meet(plane_through(a, b, c), plane_through(a, b, d));
    EXPECT_TRUE(lines_coincide(l, line_through(a, b)));
}

TEST(Projcore, DegenerateInputsThrow) {
    HomPoint<double> a(1, 2, 3, 4);
    EXPECT_THROW(line_through(a, HomPoint<double>(2, 4, 6, 8)), DegeneracyError);
    EXPECT_THROW(plane_through(a, HomPoint<double>(0, 1, 0, 0), HomPoint<double>(1, 3, 3, 4)), DegeneracyError);
}

TEST(Projcore, RationalArithmeticIsExact) {
    HomPoint<Rational> a(1, 2, 3, 4), b(0, 1, 0, 5), c(1, 0, 1, 1);
    HomPoint<Rational> x = Rational(1, 3) * a + Rational(-2, 7) * b;
    auto l = line_through(a, b);
    EXPECT_EQ(pairing(l, l), 0);
    EXPECT_EQ(point_on_line_residual(l, x), 0.0);
    EXPECT_EQ(bracket(a, b, c, x), 0);
    EXPECT_EQ(normalized(Rational(1, 3) * a)[3], Rational(4));
}
