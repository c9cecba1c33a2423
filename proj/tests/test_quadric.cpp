#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

namespace {

struct Patch {
    AsymptoticNet<double> n;
    QuadricField<double> p;
};

Patch random_patch(std::uint64_t seed, int size = 5) {
    auto n = random_net(seed, size, size);
    return {n, propagate_quadrics(n, 0, 0, 0.8 + 0.1 * double(seed % 5))};
}

}  // namespace

TEST(Quadric, EdgesAreGenerators) {
    auto [n, p] = random_patch(1);
    auto q = make_quadric(n, p, 1, 2);
    auto A = implicit_quadric(q);
    for (double u : {-2.0, 0.3, 5.0}) {
        EXPECT_LT(implicit_residual(A, HomPoint<double>(q.r + u * q.r1)), 1e-12);
        EXPECT_LT(implicit_residual(A, HomPoint<double>(q.r + u * q.r2)), 1e-12);
        EXPECT_LT(implicit_residual(A, HomPoint<double>(q.r12 + u * q.r1)), 1e-12);
        EXPECT_LT(implicit_residual(A, HomPoint<double>(q.r12 + u * q.r2)), 1e-12);
    }
    EXPECT_GT(implicit_residual(A, HomPoint<double>(q.r + q.r12)), 1e-6);
}

TEST(Quadric, GeneratorsLieOnTheQuadric) {
    auto [n, p] = random_patch(2);
    auto q = make_quadric(n, p, 2, 1);
    auto A = implicit_quadric(q);
    auto g = s_generator(q, ProjScalar<double>::affine(0.7));
    auto [a, b] = points_on_line(g);
    EXPECT_LT(implicit_residual(A, a), 1e-12);
    EXPECT_LT(implicit_residual(A, b), 1e-12);
    auto h = t_generator(q, ProjScalar<double>::affine(-1.3));
    EXPECT_TRUE(lines_intersect(g, h));
    EXPECT_LT(point_on_line_residual(g, quadric_eval(q, GenParam<double>::affine(0.7, -1.3))), 1e-12);
}

TEST(Quadric, PropagationAgreesOnBothDiagonalPaths) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        auto n = random_net(s, 6, 6);
        PropagationReport rep;
        propagate_quadrics(n, 0, 0, 1.1, 1e-10, &rep);
        EXPECT_LT(rep.max_diagonal_mismatch, 1e-10);
    }
}

TEST(Quadric, PropagationIsExactInRationalMode) {
    auto n = random_net_rational(1, 4, 4);
    PropagationReport rep;
    propagate_quadrics(n, 0, 0, Rational(3, 2), 0.0, &rep);
    EXPECT_EQ(rep.max_diagonal_mismatch, 0.0);
}

TEST(Quadric, NeighboursTouchAlongTheCommonEdge) {
    auto [n, p] = random_patch(3);
    auto q = make_quadric(n, p, 1, 1), q1 = make_quadric(n, p, 2, 1), q2 = make_quadric(n, p, 1, 2);
    for (double u : {-1.5, -0.2, 0.4, 1.0, 3.0}) {
        // The common edge with Q1 is t = 0 on Q and t = infinity on Q1; with Q2 it is s = 0 and s = infinity.
        HomPoint<double> x = n(2, 1) + u * n(2, 2);
        auto w = tangent_plane(q, GenParam<double>{ProjScalar<double>::affine(q.p / u), ProjScalar<double>::affine(0)});
        auto w1 = tangent_plane(q1, GenParam<double>{ProjScalar<double>::affine(1 / u), ProjScalar<double>::infinity()});
        EXPECT_LT(incidence_residual(w, x), 1e-12);
        EXPECT_LT(proportionality_residual(w.c, w1.c), 1e-10);
        HomPoint<double> y = n(1, 2) + u * n(2, 2);
        auto v = tangent_plane(q, GenParam<double>{ProjScalar<double>::affine(0), ProjScalar<double>::affine(q.p / u)});
        auto v2 = tangent_plane(q2, GenParam<double>{ProjScalar<double>::infinity(), ProjScalar<double>::affine(1 / u)});
        EXPECT_LT(incidence_residual(v, y), 1e-12);
        EXPECT_LT(proportionality_residual(v.c, v2.c), 1e-10);
    }
}

TEST(Quadric, SharedGeneratorsCoincide) {
    int checked = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto [n, p] = random_patch(s);
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 1 < n.cols - 1; ++j) {
                auto q = make_quadric(n, p, i, j), q1 = make_quadric(n, p, i + 1, j);
                for (auto r : shared_generators(q, frame_l(n, i, j)).roots) {
                    EXPECT_LT(proportionality_residual(s_generator(q, r).p,
                                                       s_generator(q1, neighbour_label(r, p(i, j))).p),
                              1e-8);
                    ++checked;
                }
            }
    }
    EXPECT_GT(checked, 50);
}

TEST(Quadric, ZeroStepParameterIsRejected) {
    auto n = random_net(1, 4, 4);
    EXPECT_THROW(propagate_quadrics(n, 0, 0, 0.0), std::invalid_argument);
    EXPECT_THROW(make_quadric(n, 0, 0, 0.0), std::invalid_argument);
}
