#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

TEST(Envelope, ClosesOnProjectiveMinimalNets) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        auto sol = solve_cauchy(random_cauchy_data(s, 6, 6));
        for (std::uint64_t k = 0; k < 3; ++k) {
            auto e = propagate_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, k));
            EXPECT_LT(e.max_closure(), 1e-8);
            auto d = envelope_diagnostics(e, sol.net, sol.p);
            EXPECT_LT(d.max_on_quadric, 1e-10);
            EXPECT_LT(d.max_star_tangency, 1e-8);
        }
    }
}

TEST(Envelope, SeedFaceDoesNotMatter) {
    auto sol = solve_cauchy(random_cauchy_data(4, 6, 6));
    auto e = propagate_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, 9));
    auto f = propagate_envelope(sol.net, sol.p, 2, 3, e.params(2, 3));
    for (std::size_t k = 0; k < e.points.v.size(); ++k)
        EXPECT_LT(proportionality_residual(e.points.v[k].c, f.points.v[k].c), 1e-8);
}

TEST(Envelope, GenericNetsDoNotClose) {
    auto n = random_net(2, 5, 5);
    auto p = propagate_quadrics(n, 0, 0, 1.0);
    auto e = trace_envelope(n, p, 0, 0, random_generic_seed(n, p, 0, 0, 1));
    EXPECT_GT(e.max_closure(), 1e-4);
    EXPECT_THROW(propagate_envelope(n, p, 0, 0, random_generic_seed(n, p, 0, 0, 1)), EnvelopeError);
}

TEST(Envelope, EdgesOfAGenericEnvelopeAreNotShared) {
    auto sol = solve_cauchy(random_cauchy_data(8, 5, 5));
    auto e = propagate_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, 2));
    for (char c : e.shared1.v) EXPECT_EQ(c, 0);
    for (char c : e.shared2.v) EXPECT_EQ(c, 0);
}

TEST(Envelope, SeedOutsideTheNetThrows) {
    auto n = random_net(1, 4, 4);
    auto p = propagate_quadrics(n, 0, 0, 1.0);
    EXPECT_THROW(trace_envelope(n, p, 3, 0, GenParam<double>::affine(1, 1)), std::out_of_range);
}
