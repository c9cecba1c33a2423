#include "support.hpp"

#include <gtest/gtest.h>

using namespace latticelie;

namespace {

SpecialSurface build(SpecialTarget t, std::uint64_t seed, int size) {
    auto s = construct_special(t, seed, size, size);
    if (!s.feasible) ADD_FAILURE() << s.reason;
    return s;
}

}  // namespace

TEST(Classify, CauchyNetIsGenericProjectiveMinimal) {
    auto sol = solve_cauchy(random_cauchy_data(3, 6, 6));
    auto r = classify(sol.net, sol.p);
    EXPECT_TRUE(r.pm);
    EXPECT_FALSE(r.godeauxRozet);
    EXPECT_FALSE(r.semiQ[0] || r.semiQ[1]);
    EXPECT_EQ(r.label, "generic PM");
    EXPECT_TRUE(r.contradictions.empty());
}

TEST(Classify, GenericNetIsNotProjectiveMinimal) {
    auto n = random_net(3, 5, 5);
    auto r = classify(n, propagate_quadrics(n, 0, 0, 1.0));
    EXPECT_FALSE(r.pm);
    EXPECT_EQ(r.label, "not projective minimal");
}

TEST(Classify, GodeauxRozetHasTheIntersectionProperty) {
    auto g = build(SpecialTarget::GodeauxRozet, 5, 5);
    auto r = classify(g.net, g.p);
    EXPECT_TRUE(r.pm);
    EXPECT_TRUE(r.d1_all_zero);
    EXPECT_TRUE(r.godeauxRozet);
    EXPECT_EQ(r.label, "Godeaux-Rozet");
    auto env = propagate_envelope(g.net, g.p, 0, 0, random_generic_seed(g.net, g.p, 0, 0, 3));
    auto ip = intersection_property(congruence_lines(g.net, env, CongruenceKind::L), 1);
    EXPECT_TRUE(ip.holds);
    for (int i = 0; i + 1 < env.points.rows; ++i)
        for (int j = 0; j < env.points.cols; ++j) {
            auto pr = predicted_intersection(g.net, g.p, env, i, j, 1);
            EXPECT_LT(proportionality_residual(ip.points(i, j).c, pr.c), 1e-9);
            if (i + 2 < g.net.rows) {
                auto f = solve_intersection_fgh(g.net, g.p, env, i, j);
                EXPECT_LT(f.residual, 1e-10);
                EXPECT_LT(proportionality_residual(f.point.c, pr.c), 1e-9);
            }
        }
}

TEST(Classify, GenericEnvelopeLinesDoNotMeet) {
    auto sol = solve_cauchy(random_cauchy_data(5, 5, 5));
    auto env = propagate_envelope(sol.net, sol.p, 0, 0, random_generic_seed(sol.net, sol.p, 0, 0, 1));
    auto ip = intersection_property(congruence_lines(sol.net, env, CongruenceKind::L), 1);
    EXPECT_FALSE(ip.holds);
    EXPECT_GT(ip.max_pairing, 1e-4);
}

TEST(Classify, SharedGeneratorTouchesWhenTheDiscriminantVanishes) {
    auto g = build(SpecialTarget::GodeauxRozet, 2, 4);
    int checked = 0;
    for (int i = 0; i + 2 < g.net.rows; ++i)
        for (int j = 0; j + 1 < g.net.cols; ++j) {
            auto q = make_quadric(g.net, g.p, i, j), q1 = make_quadric(g.net, g.p, i + 1, j);
            auto sg = shared_generators(q, frame_l(g.net, i, j), 1e-8);
            ASSERT_TRUE(sg.zero_discriminant);
            double s = sg.roots[0].value(), s1 = neighbour_label(sg.roots[0], g.p(i, j)).value();
            for (double t : {-2.0, -0.5, 0.25, 1.0, 3.0}) {
                auto x = quadric_eval(q, GenParam<double>::affine(s, t));
                double t1 = fixtures::t_label_of(q1, s1, x);
                auto w = tangent_plane(q, GenParam<double>::affine(s, t));
                auto w1 = tangent_plane(q1, GenParam<double>::affine(s1, t1));
                EXPECT_LT(proportionality_residual(w.c, w1.c), 1e-8);
                ++checked;
            }
        }
    EXPECT_GT(checked, 0);
}

TEST(Classify, DemoulinRelabelsConsistently) {
    auto d = build(SpecialTarget::Demoulin, 4, 5);
    auto r = classify(d.net, d.p);
    EXPECT_TRUE(r.demoulin);
    EXPECT_TRUE(r.godeauxRozet);
    ASSERT_TRUE(r.tzitzeica.has_value());
    EXPECT_FALSE(*r.tzitzeica);
    EXPECT_EQ(r.label, "Demoulin");
    auto geo = demoulin_envelope_geometry(d.net, d.p);
    EXPECT_LT(geo.max_relabel, 1e-8);
    auto env = propagate_envelope(d.net, d.p, 0, 0, random_generic_seed(d.net, d.p, 0, 0, 1));
    auto [tt, ts] = relabel_on_quadric(d.net, d.p, env, 0);
    EXPECT_LT(tt, 1e-8);
    EXPECT_LT(ts, 1e-8);
}

TEST(Classify, DemoulinGeometryNeedsVanishingDiscriminants) {
    auto sol = solve_cauchy(random_cauchy_data(2, 5, 5));
    EXPECT_THROW(demoulin_envelope_geometry(sol.net, sol.p), ConsistencyError);
}

TEST(Classify, TzitzeicaChain) {
    auto t = build(SpecialTarget::Tzitzeica, 7, 4);
    ASSERT_TRUE(t.seed.has_value());
    auto env = propagate_envelope(t.net, t.p, 0, 0, *t.seed);
    auto tz = tzitzeica_test(t.net, t.p, env);
    EXPECT_LT(tz.max_residual, 1e-9);
    EXPECT_TRUE(tz.concurrent);
    ASSERT_TRUE(tz.point.has_value());
    EXPECT_LT(tz.max_incidence, 1e-8);
    EXPECT_LT(tz.max_i1_i2, 1e-8);
    auto af = tzitzeica_potential_affine(t.net, t.p, env, *tz.point);
    EXPECT_LT(af.max_path, 1e-10);
    EXPECT_LT(af.max_scalar, 1e-10);
    EXPECT_LT(af.max_affine, 1e-8);
    EXPECT_LT(af.max_normals, 1e-8);
    auto r = classify(t.net, t.p, &env);
    EXPECT_EQ(r.label, "Tzitzeica");
}

TEST(Classify, DemoulinWithoutConcurrencyIsNotTzitzeica) {
    auto d = build(SpecialTarget::Demoulin, 9, 4);
    auto env = propagate_envelope(d.net, d.p, 0, 0, random_generic_seed(d.net, d.p, 0, 0, 4));
    auto tz = tzitzeica_test(d.net, d.p, env, 1e-9, 1, 1);
    EXPECT_GT(tz.max_residual, 1e-6);
    EXPECT_FALSE(tz.concurrent);
}

TEST(Classify, DoublyQImpliesDoublyComplex) {
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto q = build(SpecialTarget::DoublyQ, s, 4);
        auto r = classify(q.net, q.p);
        EXPECT_TRUE(r.doublyQ);
        EXPECT_TRUE(r.doublyComplex);
        EXPECT_TRUE(r.qSurface);
        EXPECT_TRUE(r.contradictions.empty());
        EXPECT_EQ(r.label, "doubly complex");
        for (int d = 0; d < 2; ++d)
            for (int c : r.strip_counts[d]) EXPECT_EQ(c, 2);
    }
}

TEST(Classify, BooleansSurviveRegauging) {
    auto g = build(SpecialTarget::GodeauxRozet, 11, 5);
    auto base = fixtures::class_booleans(classify(g.net, g.p));
    for (std::uint64_t k = 0; k < 5; ++k) {
        auto x = fixtures::random_gauge(k, g.net.rows, g.net.cols);
        auto r = classify(apply_gauge(g.net, x), gauge_face_field(g.p, x));
        EXPECT_EQ(fixtures::class_booleans(r), base);
    }
}

TEST(Special, TargetNamesRoundTrip) {
    for (auto t : {SpecialTarget::GodeauxRozet, SpecialTarget::Demoulin, SpecialTarget::Tzitzeica,
                   SpecialTarget::DoublyQ})
        EXPECT_EQ(parse_target(target_name(t)), std::optional(t));
    EXPECT_FALSE(parse_target("kummer").has_value());
}

TEST(Special, OversizedRequestsReportInfeasible) {
    auto s = construct_special(SpecialTarget::Demoulin, 1, 9, 9, 3);
    EXPECT_FALSE(s.feasible);
    EXPECT_FALSE(s.reason.empty());
}
