// Discrete envelopes of a quadric field: propagation by the tangency maps,
// the all-shared-generator envelope, and diagnostics.
#pragma once

#include "tangency.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace latticelie {

// Closure failure while propagating; (i, j) is the net vertex around which
// the four envelope points do not close.
struct EnvelopeError : std::runtime_error {
    int i, j;
    double residual;
    EnvelopeError(const std::string& what, int i_, int j_, double r)
        : std::runtime_error(what + " at vertex " + at_index(i_, j_)), i(i_), j(j_), residual(r) {}
};

// One point per face of the net. Edge flags: shared1(i, j) for the edge between
// faces (i,j), (i+1,j); shared2(i, j) for (i,j), (i,j+1). closure(i, j) is the
// mismatch around net vertex (i+1, j+1).
struct Envelope {
    Grid<GenParam<double>> params;
    Grid<HomPoint<double>> points;
    Grid<char> shared1, shared2;
    Grid<double> closure;
    int seed_i = 0, seed_j = 0;

    double max_closure() const {
        double m = 0;
        for (double v : closure.v) m = std::max(m, v);
        return m;
    }
};

namespace detail {

inline ProjScalar<double> map_label(const MoebiusMap<double>& f, const ProjScalar<double>& x) {
    if (f.degenerate) return constant_image(f);
    return *apply(f, x);
}

inline MoebiusMap<double> inverse(const MoebiusMap<double>& f, const char* what, int i, int j) {
    if (f.degenerate) throw DegeneracyError(std::string(what) + " is constant; cannot propagate backwards across face " + at_index(i, j));
    MoebiusMap<double> g;
    g.m = {{{f.m[1][1], -f.m[0][1]}, {-f.m[1][0], f.m[0][0]}}};
    return g;
}

inline double label_distance(const ProjScalar<double>& a, const ProjScalar<double>& b) {
    return proportionality_residual(std::array<double, 2>{a.num, a.den}, std::array<double, 2>{b.num, b.den});
}

struct FaceMaps {
    MoebiusMap<double> s1, t1, s2, t2;
    bool has1 = false, has2 = false;
};

inline Grid<FaceMaps> face_maps(const AsymptoticNet<double>& n, const QuadricField<double>& p) {
    Grid<FaceMaps> g(n.rows - 1, n.cols - 1);
    for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) {
            auto& f = g(i, j);
            if (has_l(n, i, j)) {
                auto l = frame_l(n, i, j);
                f.s1 = mobius_map(MapKind::S1, l, p(i, j));
                f.t1 = mobius_map(MapKind::T1, l, p(i, j));
                f.has1 = true;
            }
            if (has_m(n, i, j)) {
                auto m = frame_m(n, i, j);
                f.s2 = mobius_map(MapKind::S2, m, p(i, j));
                f.t2 = mobius_map(MapKind::T2, m, p(i, j));
                f.has2 = true;
            }
        }
    return g;
}

inline GenParam<double> step1(const FaceMaps& f, const GenParam<double>& g) {
    return {map_label(f.s1, g.s), map_label(f.t1, g.t)};
}

inline GenParam<double> step2(const FaceMaps& f, const GenParam<double>& g) {
    return {map_label(f.s2, g.s), map_label(f.t2, g.t)};
}

// Whether both points lie on one of the shared generators of the pair.
inline bool on_shared_generator(const SharedGenerators& sg, const LatticeQuadric<double>& q, int direction,
                                const HomPoint<double>& x, const HomPoint<double>& y, double tol) {
    for (const auto& r : sg.roots) {
        auto g = direction == 1 ? s_generator(q, r) : t_generator(q, r);
        if (point_on_line_residual(g, x) < tol && point_on_line_residual(g, y) < tol) return true;
    }
    return false;
}

inline void flag_edges(Envelope& e, const AsymptoticNet<double>& n, const QuadricField<double>& p, double tol) {
    const int FR = e.points.rows, FC = e.points.cols;
    e.shared1 = Grid<char>(std::max(0, FR - 1), FC, 0);
    e.shared2 = Grid<char>(FR, std::max(0, FC - 1), 0);
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            auto q = make_quadric(n, p, i, j);
            if (i + 1 < FR) {
                auto sg = shared_generators(q, frame_l(n, i, j));
                e.shared1(i, j) = on_shared_generator(sg, q, 1, e.points(i, j), e.points(i + 1, j), tol);
            }
            if (j + 1 < FC) {
                auto sg = shared_generators(q, frame_m(n, i, j));
                e.shared2(i, j) = on_shared_generator(sg, q, 2, e.points(i, j), e.points(i, j + 1), tol);
            }
        }
}

}  // namespace detail

// Runs the tangency maps from the seed face over all faces and records the
// closure mismatch at every interior vertex. Never throws on closure.
inline Envelope trace_envelope(const AsymptoticNet<double>& n, const QuadricField<double>& p, int si, int sj,
                               const GenParam<double>& g0, double flag_tol = 1e-8) {
    const int FR = n.rows - 1, FC = n.cols - 1;
    if (FR < 1 || FC < 1 || si < 0 || sj < 0 || si >= FR || sj >= FC)
        throw std::out_of_range("trace_envelope: seed face " + at_index(si, sj) + " outside the net");
    auto maps = detail::face_maps(n, p);
    Envelope e;
    e.seed_i = si;
    e.seed_j = sj;
    e.params = Grid<GenParam<double>>(FR, FC);
    e.points = Grid<HomPoint<double>>(FR, FC);
    e.params(si, sj) = g0;
    for (int i = si + 1; i < FR; ++i) e.params(i, sj) = detail::step1(maps(i - 1, sj), e.params(i - 1, sj));
    for (int i = si - 1; i >= 0; --i) {
        const auto& f = maps(i, sj);
        e.params(i, sj) = {detail::map_label(detail::inverse(f.s1, "S1", i, sj), e.params(i + 1, sj).s),
                           detail::map_label(detail::inverse(f.t1, "T1", i, sj), e.params(i + 1, sj).t)};
    }
    for (int i = 0; i < FR; ++i) {
        for (int j = sj + 1; j < FC; ++j) e.params(i, j) = detail::step2(maps(i, j - 1), e.params(i, j - 1));
        for (int j = sj - 1; j >= 0; --j) {
            const auto& f = maps(i, j);
            e.params(i, j) = {detail::map_label(detail::inverse(f.s2, "S2", i, j), e.params(i, j + 1).s),
                              detail::map_label(detail::inverse(f.t2, "T2", i, j), e.params(i, j + 1).t)};
        }
    }
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) e.points(i, j) = normalized(quadric_eval(make_quadric(n, p, i, j), e.params(i, j)));

    // Each block compares the stored point with the n1-image of its n2-neighbour.
    e.closure = Grid<double>(std::max(0, FR - 1), std::max(0, FC - 1), 0.0);
    for (int i = 0; i + 1 < FR; ++i)
        for (int j = 0; j + 1 < FC; ++j) {
            auto alt = detail::step1(maps(i, j + 1), e.params(i, j + 1));
            auto x = quadric_eval(make_quadric(n, p, i + 1, j + 1), alt);
            e.closure(i, j) = proportionality_residual(x.c, e.points(i + 1, j + 1).c);
        }
    detail::flag_edges(e, n, p, flag_tol);
    return e;
}

// As trace_envelope, but the first vertex (row-major) whose closure exceeds
// tol aborts with EnvelopeError.
inline Envelope propagate_envelope(const AsymptoticNet<double>& n, const QuadricField<double>& p, int si, int sj,
                                   const GenParam<double>& g0, double tol = 1e-8) {
    auto e = trace_envelope(n, p, si, sj, g0);
    for (int i = 0; i < e.closure.rows; ++i)
        for (int j = 0; j < e.closure.cols; ++j)
            if (!(e.closure(i, j) <= tol))
                throw EnvelopeError("envelope does not close", i + 1, j + 1, e.closure(i, j));
    return e;
}

// A seed whose generators stay away from every shared-generator label of the
// seed face and from the labels where the maps have poles.
inline GenParam<double> random_generic_seed(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i,
                                            int j, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto q = make_quadric(n, p, i, j);
    std::vector<ProjScalar<double>> bad_s{ProjScalar<double>::affine(0), ProjScalar<double>::infinity()},
        bad_t = bad_s;
    if (has_l(n, i, j))
        for (auto r : shared_generators(q, frame_l(n, i, j)).roots) bad_s.push_back(r);
    if (i > 0 && has_l(n, i - 1, j))
        for (auto r : shared_generators(make_quadric(n, p, i - 1, j), frame_l(n, i - 1, j)).roots)
            bad_s.push_back(neighbour_label(r, p(i - 1, j)));
    if (has_m(n, i, j))
        for (auto r : shared_generators(q, frame_m(n, i, j)).roots) bad_t.push_back(r);
    if (j > 0 && has_m(n, i, j - 1))
        for (auto r : shared_generators(make_quadric(n, p, i, j - 1), frame_m(n, i, j - 1)).roots)
            bad_t.push_back(neighbour_label(r, p(i, j - 1)));
    auto far = [](const ProjScalar<double>& x, const std::vector<ProjScalar<double>>& bad) {
        for (auto& b : bad)
            if (detail::label_distance(x, b) < 1e-3) return false;
        return true;
    };
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto gp = GenParam<double>::affine(g(rng), g(rng));
        if (!far(gp.s, bad_s) || !far(gp.t, bad_t)) continue;
        bool sep = true;
        for (auto& b : bad_s) sep = sep && proportionality_residual(s_generator(q, gp.s).p, s_generator(q, b).p) > 1e-6;
        for (auto& b : bad_t) sep = sep && proportionality_residual(t_generator(q, gp.t).p, t_generator(q, b).p) > 1e-6;
        if (sep) return gp;
    }
    throw DegeneracyError("random_generic_seed: no generic seed found");
}

// The envelope whose edges are all shared generators. The s-label of face
// (i, j) is a root for the pair (i,j), (i+1,j); the last row carries the label
// of its predecessor. Same for t along n2. choice picks the first root (in
// increasing order) at the start of each strip; later faces take the root
// nearest the carried label.
inline Envelope all_shared_envelope(const AsymptoticNet<double>& n, const QuadricField<double>& p, int choice1 = 0,
                                    int choice2 = 0, double flag_tol = 1e-8) {
    const int FR = n.rows - 1, FC = n.cols - 1;
    if (FR < 2 || FC < 2) throw std::invalid_argument("all_shared_envelope: needs at least a 3x3 net");
    Envelope e;
    e.params = Grid<GenParam<double>>(FR, FC);
    e.points = Grid<HomPoint<double>>(FR, FC);
    auto pick = [](std::vector<ProjScalar<double>> roots, int choice, const ProjScalar<double>* near, int i, int j) {
        if (roots.empty()) throw DegeneracyError("complex shared generators at face " + at_index(i, j));
        std::sort(roots.begin(), roots.end(), [](auto& a, auto& b) {
            return std::atan2(a.num, a.den) < std::atan2(b.num, b.den);
        });
        if (!near) return roots[std::min<std::size_t>(choice, roots.size() - 1)];
        auto best = roots[0];
        for (auto& r : roots)
            if (detail::label_distance(r, *near) < detail::label_distance(best, *near)) best = r;
        return best;
    };
    for (int j = 0; j < FC; ++j)
        for (int i = 0; i < FR; ++i) {
            if (i + 1 < FR) {
                auto sg = shared_generators(make_quadric(n, p, i, j), frame_l(n, i, j));
                std::optional<ProjScalar<double>> carried;
                if (i > 0) carried = neighbour_label(e.params(i - 1, j).s, p(i - 1, j));
                e.params(i, j).s = pick(sg.roots, choice1, carried ? &*carried : nullptr, i, j);
            } else {
                e.params(i, j).s = neighbour_label(e.params(i - 1, j).s, p(i - 1, j));
            }
        }
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            if (j + 1 < FC) {
                auto sg = shared_generators(make_quadric(n, p, i, j), frame_m(n, i, j));
                std::optional<ProjScalar<double>> carried;
                if (j > 0) carried = neighbour_label(e.params(i, j - 1).t, p(i, j - 1));
                e.params(i, j).t = pick(sg.roots, choice2, carried ? &*carried : nullptr, i, j);
            } else {
                e.params(i, j).t = neighbour_label(e.params(i, j - 1).t, p(i, j - 1));
            }
        }
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) e.points(i, j) = normalized(quadric_eval(make_quadric(n, p, i, j), e.params(i, j)));
    e.closure = Grid<double>(FR - 1, FC - 1, 0.0);
    detail::flag_edges(e, n, p, flag_tol);
    return e;
}

struct EnvelopeDiagnostics {
    double max_closure = 0;
    double max_star_tangency = 0;
    double max_on_quadric = 0;
    double shared_fraction1 = 0, shared_fraction2 = 0;
    // Coordinate polygons: n1 polygons run along i at fixed j.
    double max_polygon_residual1 = 0, max_polygon_residual2 = 0;
    bool straight1 = false, straight2 = false;
};

namespace detail {

// sigma3 / sigma1 of the stacked normalized points; zero when collinear.
inline double collinearity(const std::vector<HomPoint<double>>& pts) {
    if (pts.size() < 3) return 0;
    Eigen::MatrixXd a(pts.size(), 4);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        auto x = normalized(pts[k]);
        for (int c = 0; c < 4; ++c) a(Eigen::Index(k), c) = x[c];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    auto s = svd.singularValues();
    return s(0) > 0 ? s(2) / s(0) : 0;
}

}  // namespace detail

inline EnvelopeDiagnostics envelope_diagnostics(const Envelope& e, const AsymptoticNet<double>& n,
                                                const QuadricField<double>& p, double straight_tol = 1e-8) {
    EnvelopeDiagnostics d;
    d.max_closure = e.max_closure();
    const int FR = e.points.rows, FC = e.points.cols;
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            auto q = make_quadric(n, p, i, j);
            const auto& g = e.params(i, j);
            auto x = e.points(i, j);
            auto ds = quadric_ds(q, g), dt = quadric_dt(q, g);
            const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int a = i + di[k], b = j + dj[k];
                if (!e.points.contains(a, b)) continue;
                d.max_star_tangency = std::max(d.max_star_tangency, bracket_normalized(x, ds, dt, e.points(a, b)));
            }
            try {
                d.max_on_quadric = std::max(d.max_on_quadric, implicit_residual(implicit_quadric(q), x));
            } catch (const std::exception&) {
            }
        }
    auto fraction = [](const Grid<char>& g) {
        if (g.v.empty()) return 0.0;
        int c = 0;
        for (char v : g.v) c += v != 0;
        return double(c) / double(g.v.size());
    };
    d.shared_fraction1 = fraction(e.shared1);
    d.shared_fraction2 = fraction(e.shared2);
    for (int j = 0; j < FC; ++j) {
        std::vector<HomPoint<double>> pts;
        for (int i = 0; i < FR; ++i) pts.push_back(e.points(i, j));
        d.max_polygon_residual1 = std::max(d.max_polygon_residual1, detail::collinearity(pts));
    }
    for (int i = 0; i < FR; ++i) {
        std::vector<HomPoint<double>> pts;
        for (int j = 0; j < FC; ++j) pts.push_back(e.points(i, j));
        d.max_polygon_residual2 = std::max(d.max_polygon_residual2, detail::collinearity(pts));
    }
    d.straight1 = FR >= 3 && d.max_polygon_residual1 < straight_tol;
    d.straight2 = FC >= 3 && d.max_polygon_residual2 < straight_tol;
    return d;
}

// Points on one s-generator of the face quadric are sent by the tangency maps
// in either direction onto one generator of the neighbour. Returns the larger of the tangency brackets and the collinearity
// of the images of the given points.
inline double generator_to_generator(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j,
                                     int direction, const ProjScalar<double>& fixed,
                                     const std::vector<ProjScalar<double>>& moving) {
    auto q = make_quadric(n, p, i, j);
    auto q1 = direction == 1 ? make_quadric(n, p, i + 1, j) : make_quadric(n, p, i, j + 1);
    detail::FaceMaps f;
    if (direction == 1) {
        auto l = frame_l(n, i, j);
        f.s1 = mobius_map(MapKind::S1, l, p(i, j));
        f.t1 = mobius_map(MapKind::T1, l, p(i, j));
    } else {
        auto m = frame_m(n, i, j);
        f.s2 = mobius_map(MapKind::S2, m, p(i, j));
        f.t2 = mobius_map(MapKind::T2, m, p(i, j));
    }
    double worst = 0;
    std::vector<HomPoint<double>> images;
    for (const auto& v : moving) {
        GenParam<double> g{fixed, v};
        auto g1 = direction == 1 ? detail::step1(f, g) : detail::step2(f, g);
        auto [ta, tb] = tangency_residual(q, q1, g, g1);
        worst = std::max({worst, ta, tb});
        images.push_back(quadric_eval(q1, g1));
    }
    return std::max(worst, detail::collinearity(images));
}

}  // namespace latticelie
