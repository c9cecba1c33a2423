#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

TEST(Cauchy, SolutionKeepsTheStrips) {
    auto d = random_cauchy_data(11, 6, 6);
    auto sol = solve_cauchy(d);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (on_strips(i, j)) EXPECT_EQ(sol.net(i, j).c, d.points(i, j).c);
    EXPECT_EQ(sol.trace.vertices.size(), 16u);
    EXPECT_TRUE(validate_asymptotic(sol.net).passed);
}

TEST(Cauchy, InteriorVerticesAreRecovered) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto sol = solve_cauchy(random_cauchy_data(s, 6, 6));
        for (int a = 2; a < 6; ++a)
            for (int b = 2; b < 6; ++b) EXPECT_LT(delete_and_restore(sol.net, sol.p, a, b), 1e-8);
    }
}

TEST(Cauchy, AlternativeFieldsAreRejected) {
    auto sol = solve_cauchy(random_cauchy_data(21, 5, 5));
    auto v = uniqueness_probe(sol.net, sol.p, 20);
    EXPECT_TRUE(v.unique);
    EXPECT_EQ(v.trials.size(), 20u);
}

TEST(Cauchy, MissingStripVertexIsRejected) {
    auto d = random_cauchy_data(1, 5, 5);
    d.known(0, 3) = 0;
    EXPECT_THROW(solve_cauchy(d), std::invalid_argument);
}

TEST(Cauchy, RationalNetsAreExactlyAsymptotic) {
    auto n = random_net_rational(5, 4, 5);
    auto v = validate_asymptotic(n);
    EXPECT_TRUE(v.passed);
    EXPECT_EQ(v.max_planarity, 0.0);
}
