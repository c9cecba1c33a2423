// Classification of discrete PMQ surfaces: discriminants, strip-wide shared
// generators, line congruences and the Tzitzeica potential.
#pragma once

#include "envelope.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace latticelie {

// Congruence lines join the envelope point of a face to one of its corners:
// L to r, L1 to r1, L2 to r2, L12 to r12.
enum class CongruenceKind { L, L1, L2, L12 };

struct CongruenceLines {
    CongruenceKind kind = CongruenceKind::L;
    Grid<ProjLine<double>> lines;
};

inline std::pair<int, int> corner_offset(CongruenceKind k) {
    switch (k) {
        case CongruenceKind::L: return {0, 0};
        case CongruenceKind::L1: return {1, 0};
        case CongruenceKind::L2: return {0, 1};
        case CongruenceKind::L12: return {1, 1};
    }
    return {0, 0};
}

inline CongruenceLines congruence_lines(const AsymptoticNet<double>& n, const Envelope& env, CongruenceKind kind) {
    auto [di, dj] = corner_offset(kind);
    CongruenceLines out;
    out.kind = kind;
    out.lines = Grid<ProjLine<double>>(env.points.rows, env.points.cols);
    for (int i = 0; i < env.points.rows; ++i)
        for (int j = 0; j < env.points.cols; ++j) {
            try {
                out.lines(i, j) = line_through(env.points(i, j), n(i + di, j + dj));
            } catch (const DegeneracyError&) {
                throw DegeneracyError("congruence line: envelope point coincides with the corner of face " +
                                      at_index(i, j));
            }
        }
    return out;
}

// pairing(i, j) compares the line of face (i, j) with its neighbour in the
// given direction; points(i, j) is their intersection when it holds.
struct IntersectionReport {
    bool holds = false;
    double max_pairing = 0;
    double tol = 0;
    Grid<double> pairing;
    Grid<HomPoint<double>> points;
};

inline IntersectionReport intersection_property(const CongruenceLines& cl, int direction, double tol = 1e-8) {
    if (direction != 1 && direction != 2) throw std::invalid_argument("intersection_property: direction is 1 or 2");
    const int R = cl.lines.rows - (direction == 1), C = cl.lines.cols - (direction == 2);
    IntersectionReport rep;
    rep.tol = tol;
    rep.pairing = Grid<double>(std::max(R, 0), std::max(C, 0), 0.0);
    rep.points = Grid<HomPoint<double>>(std::max(R, 0), std::max(C, 0));
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            const auto& l = cl.lines(i, j);
            const auto& m = direction == 1 ? cl.lines(i + 1, j) : cl.lines(i, j + 1);
            double v = std::abs(pairing_normalized(l, m));
            rep.pairing(i, j) = v;
            rep.max_pairing = std::max(rep.max_pairing, v);
            if (v < tol && !lines_coincide(l, m, 1e-12)) rep.points(i, j) = normalized(intersect_lines(l, m));
        }
    rep.holds = R > 0 && C > 0 && rep.max_pairing < tol;
    return rep;
}

// p r12 + s r1 + t r2 + p s1 t r (direction 1) and p r12 + s r1 + t r2 + p t2 s r
// (direction 2), with the affine labels of the envelope.
inline HomPoint<double> predicted_intersection(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                               const Envelope& env, int i, int j, int direction) {
    const double s = env.params(i, j).s.value(), t = env.params(i, j).t.value(), pp = p(i, j);
    double k = direction == 1 ? pp * env.params(i + 1, j).s.value() * t : pp * env.params(i, j + 1).t.value() * s;
    return normalized(pp * n(i + 1, j + 1) + s * n(i + 1, j) + t * n(i, j + 1) + k * n(i, j));
}

// Solution of f r + g r1 + h X + X1 = 0 for the n1 pair at face (i, j), with
// X = p r12 + s r1 + t r2 + s t r and X1 the same expression on the neighbour,
// expanded in the frame of (i, j). The r2 component reads h t + b2 p1 = 0.
struct IntersectionSolve {
    double f = 0, g = 0, h = 0;
    double residual = 0;  // of the four components, relative to the term sizes
    HomPoint<double> point;  // X + (f / h) r
};

inline IntersectionSolve solve_intersection_fgh(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                                const Envelope& env, int i, int j) {
    auto l = frame_l(n, i, j);
    const double s = env.params(i, j).s.value(), t = env.params(i, j).t.value();
    const double s1 = env.params(i + 1, j).s.value(), t1 = env.params(i + 1, j).t.value();
    const double pp = p(i, j), p1 = p(i + 1, j);
    IntersectionSolve out;
    out.f = l.a0 * (s / pp - s1);
    out.g = l.a0 * s / (pp * t) - l.a0 * l.b1 / (l.b2 * pp) - l.a1 * s1 - s1 * t1;
    out.h = -l.a0 / (pp * t);
    const auto &r = n(i, j), &r1 = n(i + 1, j), &r2 = n(i, j + 1), &r12 = n(i + 1, j + 1);
    HomPoint<double> x = pp * r12 + s * r1 + t * r2 + (s * t) * r;
    HomPoint<double> x1 = p1 * n(i + 2, j + 1) + s1 * n(i + 2, j) + t1 * r12 + (s1 * t1) * r1;
    HomPoint<double> res = out.f * r + out.g * r1 + out.h * x + x1;
    double scale = std::abs(out.f) * norm(r) + std::abs(out.g) * norm(r1) + std::abs(out.h) * norm(x) + norm(x1);
    out.residual = norm(res) / scale;
    out.point = normalized(x + (out.f / out.h) * r);
    return out;
}

// ---------------------------------------------------------------------------
// Strip-wide shared generators.

// Number of distinct lines that are shared generators of every consecutive
// pair along the strip, and the lines themselves.
struct StripGenerators {
    int count = 0;
    std::vector<ProjLine<double>> lines;
};

inline std::vector<ProjLine<double>> pair_generators(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                                     int i, int j, int direction) {
    auto q = make_quadric(n, p, i, j);
    std::vector<ProjLine<double>> out;
    if (direction == 1) {
        for (auto& r : shared_generators(q, frame_l(n, i, j)).roots) out.push_back(s_generator(q, r));
    } else {
        for (auto& r : shared_generators(q, frame_m(n, i, j)).roots) out.push_back(t_generator(q, r));
    }
    return out;
}

// Strip `index` of the given direction: faces (k, index) for direction 1,
// (index, k) for direction 2.
inline StripGenerators strip_generators(const AsymptoticNet<double>& n, const QuadricField<double>& p, int direction,
                                        int index, double tol = 1e-8) {
    const int FR = n.rows - 1, FC = n.cols - 1;
    const int len = direction == 1 ? FR : FC;
    StripGenerators out;
    if (len < 2) return out;
    std::vector<std::vector<ProjLine<double>>> pairs;
    for (int k = 0; k + 1 < len; ++k)
        pairs.push_back(direction == 1 ? pair_generators(n, p, k, index, 1) : pair_generators(n, p, index, k, 2));
    for (const auto& cand : pairs[0]) {
        bool all = true;
        for (std::size_t k = 1; k < pairs.size() && all; ++k) {
            bool found = false;
            for (const auto& g : pairs[k]) found = found || lines_coincide(cand, g, tol);
            all = found;
        }
        bool dup = false;
        for (const auto& g : out.lines) dup = dup || lines_coincide(cand, g, tol);
        if (all && !dup) out.lines.push_back(cand);
    }
    out.count = int(out.lines.size());
    return out;
}

// ---------------------------------------------------------------------------
// Demoulin geometry: A, B, C, D are the intersections of the four generators
// of Q shared with the neighbours. With s-, s+ the s-labels shared with the
// previous and next quadric along n1 and t-, t+ along n2:
//   A = Q(s-, t-), B = Q(s-, t+), C = Q(s+, t+), D = Q(s+, t-).
struct DemoulinGeometry {
    Grid<HomPoint<double>> A, B, C, D;
    Grid<char> defined;  // faces with all four neighbours
    double max_relabel = 0;  // A1 = D, B1 = C, A2 = B, D2 = C, A12 = C
    double max_t_tilde = 0;  // omega_1 on Q has the t-label of omega
    double max_s_tilde = 0;  // and the s-label of the shared generator
};

inline DemoulinGeometry demoulin_envelope_geometry(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                                   double tol = 1e-8) {
    const int FR = n.rows - 1, FC = n.cols - 1;
    if (FR < 3 || FC < 3) throw std::invalid_argument("demoulin_envelope_geometry: needs at least a 4x4 net");
    auto root = [&](int i, int j, int direction) {
        auto q = make_quadric(n, p, i, j);
        auto sg = direction == 1 ? shared_generators(q, frame_l(n, i, j), tol) : shared_generators(q, frame_m(n, i, j), tol);
        if (!sg.zero_discriminant || sg.roots.empty())
            throw ConsistencyError("demoulin_envelope_geometry: shared generators are not coinciding at face " +
                                   at_index(i, j) + " (D != 0)");
        return sg.roots[0];
    };
    DemoulinGeometry g;
    g.A = g.B = g.C = g.D = Grid<HomPoint<double>>(FR, FC);
    g.defined = Grid<char>(FR, FC, 0);
    for (int i = 1; i + 1 < FR; ++i)
        for (int j = 1; j + 1 < FC; ++j) {
            auto q = make_quadric(n, p, i, j);
            auto sp = root(i, j, 1), tp = root(i, j, 2);
            auto sm = neighbour_label(root(i - 1, j, 1), p(i - 1, j));
            auto tm = neighbour_label(root(i, j - 1, 2), p(i, j - 1));
            g.A(i, j) = normalized(quadric_eval(q, GenParam<double>{sm, tm}));
            g.B(i, j) = normalized(quadric_eval(q, GenParam<double>{sm, tp}));
            g.C(i, j) = normalized(quadric_eval(q, GenParam<double>{sp, tp}));
            g.D(i, j) = normalized(quadric_eval(q, GenParam<double>{sp, tm}));
            g.defined(i, j) = 1;
        }
    auto cmp = [](const HomPoint<double>& a, const HomPoint<double>& b) { return proportionality_residual(a.c, b.c); };
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            if (!g.defined(i, j)) continue;
            if (g.defined.contains(i + 1, j) && g.defined(i + 1, j)) {
                g.max_relabel = std::max({g.max_relabel, cmp(g.A(i + 1, j), g.D(i, j)), cmp(g.B(i + 1, j), g.C(i, j))});
            }
            if (g.defined.contains(i, j + 1) && g.defined(i, j + 1)) {
                g.max_relabel = std::max({g.max_relabel, cmp(g.A(i, j + 1), g.B(i, j)), cmp(g.D(i, j + 1), g.C(i, j))});
            }
            if (g.defined.contains(i + 1, j + 1) && g.defined(i + 1, j + 1))
                g.max_relabel = std::max(g.max_relabel, cmp(g.A(i + 1, j + 1), g.C(i, j)));
        }
    return g;
}

// For a D1 = 0 net and an envelope whose points are off the generator shared
// with the next quadric: omega_1 written on Q is Q(s~, t) with s~ the shared
// label. Returns the worst relative deviation of t~ from t and of s~ from the
// shared label, over the faces (i, j) with i >= i0.
inline std::pair<double, double> relabel_on_quadric(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                                    const Envelope& env, int i0 = 0) {
    double wt = 0, ws = 0;
    for (int i = i0; i + 1 < env.points.rows; ++i)
        for (int j = 0; j < env.points.cols; ++j) {
            auto y = detail::frame_coords(n, i, j, env.points(i + 1, j));  // ~ (s t, s, t, p)
            const double pp = p(i, j);
            double tt = pp * y[2] / y[3], ss = pp * y[1] / y[3];
            double t = env.params(i, j).t.value();
            auto q = make_quadric(n, p, i, j);
            auto sg = shared_generators(q, frame_l(n, i, j), 1e-6);
            double sh = sg.roots.empty() ? NAN : sg.roots[0].value();
            wt = std::max(wt, std::abs(tt - t) / std::max({std::abs(t), std::abs(tt), 1e-300}));
            ws = std::max(ws, std::abs(ss - sh) / std::max({std::abs(sh), std::abs(ss), 1e-300}));
        }
    return {wt, ws};
}

// ---------------------------------------------------------------------------
// Tzitzeica.

struct TzitzeicaReport {
    Grid<double> residual;  // |s1 t - t2 s| relative, per face with both neighbours
    double max_residual = 0;
    double max_i1_i2 = 0;   // I1 against I2 per face
    bool concurrent = false;
    std::optional<HomPoint<double>> point;
    double max_incidence = INFINITY;  // of the L-lines against the common point
    int i0 = 0, j0 = 0;
};

namespace detail {

// Least-squares common point of lines: the null direction of the stacked,
// normalized dual matrices.
inline std::pair<HomPoint<double>, double> common_point(const std::vector<ProjLine<double>>& lines) {
    Eigen::MatrixXd a(4 * lines.size(), 4);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        auto d = dual_matrix(lines[k]);
        double nl = norm(lines[k]);
        for (int u = 0; u < 4; ++u)
            for (int v = 0; v < 4; ++v) a(Eigen::Index(4 * k + u), v) = d[u][v] / nl;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    Eigen::Vector4d x = svd.matrixV().col(3);
    HomPoint<double> pt(x(0), x(1), x(2), x(3));
    double worst = 0;
    for (const auto& l : lines) worst = std::max(worst, point_on_line_residual(l, pt));
    return {pt, worst};
}

}  // namespace detail

// Faces (i, j) with i >= i0, j >= j0 enter; with an envelope propagated from
// a generic seed on a Demoulin net, the seed row and column are not part of
// the canonical envelope and i0 = j0 = 1 skips them.
inline TzitzeicaReport tzitzeica_test(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                      const Envelope& env, double tol = 1e-9, int i0 = 0, int j0 = 0) {
    const int FR = env.points.rows, FC = env.points.cols;
    TzitzeicaReport rep;
    rep.i0 = i0;
    rep.j0 = j0;
    rep.residual = Grid<double>(std::max(FR - 1, 0), std::max(FC - 1, 0), 0.0);
    for (int i = i0; i + 1 < FR; ++i)
        for (int j = j0; j + 1 < FC; ++j) {
            double s = env.params(i, j).s.value(), t = env.params(i, j).t.value();
            double s1 = env.params(i + 1, j).s.value(), t2 = env.params(i, j + 1).t.value();
            double v = std::abs(s1 * t - t2 * s) / (std::abs(s1 * t) + std::abs(t2 * s));
            rep.residual(i, j) = v;
            rep.max_residual = std::max(rep.max_residual, v);
            auto a = predicted_intersection(n, p, env, i, j, 1), b = predicted_intersection(n, p, env, i, j, 2);
            rep.max_i1_i2 = std::max(rep.max_i1_i2, proportionality_residual(a.c, b.c));
        }
    if (rep.max_residual < tol) {
        auto cl = congruence_lines(n, env, CongruenceKind::L);
        std::vector<ProjLine<double>> lines;
        for (int i = i0; i < FR; ++i)
            for (int j = j0; j < FC; ++j) lines.push_back(cl.lines(i, j));
        auto [pt, worst] = detail::common_point(lines);
        rep.point = normalized(pt);
        rep.max_incidence = worst;
        rep.concurrent = worst < 1e-8;
    }
    return rep;
}

// phi on the net vertices from phi_1 = -t phi, phi_2 = -s phi with the labels
// of the face at the start of each edge, and the affine checks.
struct AffineReport {
    Grid<double> phi;  // NaN where not reached
    double max_path = 0;       // phi_12 through both orders
    double max_scalar = 0;     // t1 t - (a0 - a1 t + a3 s1 t)
    double max_affine = 0;     // r^a_12 + r^a - h (r^a_1 + r^a_2)
    double max_normals = 0;    // distance of the affine normals from their common point
    Grid<double> h;
    HomPoint<double> centre;   // concurrency point used for the affine chart
};

inline AffineReport tzitzeica_potential_affine(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                               const Envelope& env, const HomPoint<double>& centre,
                                               double path_tol = 1e-8) {
    const int FR = env.points.rows, FC = env.points.cols;
    AffineReport rep;
    rep.centre = normalized(centre);
    rep.phi = Grid<double>(n.rows, n.cols, NAN);
    auto s_at = [&](int i, int j) { return env.params(i, j).s.value(); };
    auto t_at = [&](int i, int j) { return env.params(i, j).t.value(); };
    // Column 0, then along every row with a face; the last row from above.
    // The far corner has no face to reach it.
    rep.phi(0, 0) = 1.0;
    for (int i = 0; i < FR; ++i) rep.phi(i + 1, 0) = -t_at(i, 0) * rep.phi(i, 0);
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) rep.phi(i, j + 1) = -s_at(i, j) * rep.phi(i, j);
    for (int j = 1; j < FC; ++j) rep.phi(FR, j) = -t_at(FR - 1, j) * rep.phi(FR - 1, j);
    for (int i = 0; i + 1 < FR; ++i)
        for (int j = 0; j + 1 < FC; ++j) {
            double a = s_at(i + 1, j) * t_at(i, j), b = t_at(i, j + 1) * s_at(i, j);
            rep.max_path = std::max(rep.max_path, std::abs(a - b) / (std::abs(a) + std::abs(b)));
        }
    if (rep.max_path > path_tol) throw ConsistencyError("tzitzeica_potential_affine: phi is path dependent");
    for (int i = 0; i + 1 < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            auto l = frame_l(n, i, j);
            double t = t_at(i, j), t1 = t_at(i + 1, j), s1 = s_at(i + 1, j);
            double lhs = t1 * t, rhs = l.a0 - l.a1 * t + l.a3 * s1 * t;
            double sc = std::abs(lhs) + std::abs(l.a0) + std::abs(l.a1 * t) + std::abs(l.a3 * s1 * t);
            rep.max_scalar = std::max(rep.max_scalar, std::abs(lhs - rhs) / sc);
        }
    // Affine chart: coordinates along an orthonormal complement of the centre.
    Eigen::Vector4d c(rep.centre[0], rep.centre[1], rep.centre[2], rep.centre[3]);
    Eigen::Matrix4d hh = Eigen::Matrix4d::Identity() - c * c.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(hh);
    Eigen::Matrix<double, 4, 3> u = es.eigenvectors().rightCols<3>();
    auto affine = [&](int i, int j) {
        const auto& r = n(i, j);
        Eigen::Vector4d v(r[0], r[1], r[2], r[3]);
        return Eigen::Vector3d(u.transpose() * v / rep.phi(i, j));
    };
    rep.h = Grid<double>(FR, FC, NAN);
    std::vector<std::pair<Eigen::Vector3d, Eigen::Vector3d>> normals;
    double size = 0;
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j < FC; ++j) {
            if (std::isnan(rep.phi(i + 1, j + 1))) continue;
            double h = rep.phi(i + 1, j) * rep.phi(i, j + 1) / (p(i, j) * rep.phi(i + 1, j + 1) * rep.phi(i, j));
            rep.h(i, j) = h;
            auto a = affine(i, j), a1 = affine(i + 1, j), a2 = affine(i, j + 1), a12 = affine(i + 1, j + 1);
            Eigen::Vector3d res = a12 + a - h * (a1 + a2);
            double sc = a12.norm() + a.norm() + std::abs(h) * (a1.norm() + a2.norm());
            rep.max_affine = std::max(rep.max_affine, res.norm() / sc);
            Eigen::Vector3d m1 = 0.5 * (a + a12), m2 = 0.5 * (a1 + a2);
            size = std::max({size, m1.norm(), m2.norm()});
            normals.push_back({m1, (m2 - m1).normalized()});
        }
    // Least-squares common point of the affine normals.
    Eigen::Matrix3d lhs = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (auto& [m, d] : normals) {
        Eigen::Matrix3d pr = Eigen::Matrix3d::Identity() - d * d.transpose();
        lhs += pr;
        rhs += pr * m;
    }
    Eigen::Vector3d cp = lhs.colPivHouseholderQr().solve(rhs);
    for (auto& [m, d] : normals) {
        Eigen::Vector3d w = cp - m;
        rep.max_normals = std::max(rep.max_normals, (w - d * d.dot(w)).norm() / std::max(size, 1e-300));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// The classifier.

struct SurfaceClassReport {
    double tol = 1e-8;
    bool pm = false;
    double pm_residual = 0;
    Grid<double> d1_rel, d2_rel;  // |D| / scale per face
    Grid<char> d1_zero, d2_zero;
    bool d1_all_zero = false, d2_all_zero = false;
    // Strip-wide generator counts per strip; direction index 0 is n1.
    std::array<std::vector<int>, 2> strip_counts;
    std::array<bool, 2> semiQ{false, false}, complexSurf{false, false}, hybrid{false, false};
    bool doublyQ = false, doublyComplex = false, qSurface = false;
    bool godeauxRozet = false, demoulin = false;
    std::optional<bool> tzitzeica;  // only evaluated on Demoulin nets
    std::vector<std::string> warnings;
    std::vector<std::string> contradictions;
    std::string label;
};

inline SurfaceClassReport classify(const AsymptoticNet<double>& n, const QuadricField<double>& p,
                                   const Envelope* env = nullptr, double tol = 1e-8) {
    SurfaceClassReport rep;
    rep.tol = tol;
    const int R = n.rows, C = n.cols, FR = R - 1, FC = C - 1;
    if (R < 3 || C < 3) throw std::invalid_argument("classify: needs at least a 3x3 net");
    double worst = 0;
    for (int i = 0; i + 2 < R; ++i)
        for (int j = 0; j + 2 < C; ++j) worst = std::max(worst, pm_residual_maps(n, p, i, j).value());
    rep.pm_residual = worst;
    rep.pm = worst < tol;

    rep.d1_rel = Grid<double>(std::max(R - 2, 0), FC, 0.0);
    rep.d1_zero = Grid<char>(std::max(R - 2, 0), FC, 0);
    rep.d2_rel = Grid<double>(FR, std::max(C - 2, 0), 0.0);
    rep.d2_zero = Grid<char>(FR, std::max(C - 2, 0), 0);
    rep.d1_all_zero = rep.d2_all_zero = true;
    for (int i = 0; i + 2 < R; ++i)
        for (int j = 0; j < FC; ++j) {
            auto l = frame_l(n, i, j);
            double v = std::abs(discriminant1(l, p(i, j))) / discriminant1_scale(l, p(i, j));
            rep.d1_rel(i, j) = v;
            rep.d1_zero(i, j) = v < tol;
            rep.d1_all_zero = rep.d1_all_zero && v < tol;
        }
    for (int i = 0; i < FR; ++i)
        for (int j = 0; j + 2 < C; ++j) {
            auto m = frame_m(n, i, j);
            double v = std::abs(discriminant2(m, p(i, j))) / discriminant2_scale(m, p(i, j));
            rep.d2_rel(i, j) = v;
            rep.d2_zero(i, j) = v < tol;
            rep.d2_all_zero = rep.d2_all_zero && v < tol;
        }
    rep.godeauxRozet = rep.d1_all_zero || rep.d2_all_zero;
    rep.demoulin = rep.d1_all_zero && rep.d2_all_zero;
    // Mixed zero/nonzero discriminants violate the homogeneity assumption.
    auto mixed = [](const Grid<char>& g) {
        int z = 0;
        for (char c : g.v) z += c != 0;
        return z > 0 && z < int(g.v.size());
    };
    if (mixed(rep.d1_zero)) rep.warnings.push_back("hybrid: D1 vanishes on some faces only");
    if (mixed(rep.d2_zero)) rep.warnings.push_back("hybrid: D2 vanishes on some faces only");

    for (int d = 0; d < 2; ++d) {
        const int strips = d == 0 ? FC : FR;
        int with1 = 0, with2 = 0;
        for (int k = 0; k < strips; ++k) {
            int c = strip_generators(n, p, d + 1, k, tol).count;
            rep.strip_counts[d].push_back(c);
            with1 += c >= 1;
            with2 += c >= 2;
        }
        const bool strips_ok = (d == 0 ? FR : FC) >= 2;
        rep.semiQ[d] = strips_ok && with1 == strips;
        rep.complexSurf[d] = strips_ok && with2 == strips;
        if ((with1 > 0 && with1 < strips) || (with2 > 0 && with2 < strips)) {
            rep.hybrid[d] = true;
            rep.semiQ[d] = rep.complexSurf[d] = false;
            rep.warnings.push_back(std::string("hybrid: strip-wide generators on some n") + char('1' + d) +
                                   " strips only; abstaining in that direction");
        }
    }
    rep.doublyQ = (rep.complexSurf[0] && rep.semiQ[1]) || (rep.complexSurf[1] && rep.semiQ[0]);
    rep.doublyComplex = rep.complexSurf[0] && rep.complexSurf[1];
    if (rep.doublyQ && !rep.doublyComplex) rep.contradictions.push_back("doubly Q but not doubly complex");

    if (rep.semiQ[0] && rep.semiQ[1]) {
        for (int c1 = 0; c1 < 2 && !rep.qSurface; ++c1)
            for (int c2 = 0; c2 < 2 && !rep.qSurface; ++c2) {
                try {
                    auto e = all_shared_envelope(n, p, c1, c2);
                    auto dg = envelope_diagnostics(e, n, p);
                    rep.qSurface = dg.shared_fraction1 == 1.0 && dg.shared_fraction2 == 1.0 &&
                                   (dg.straight1 || FR < 3) && (dg.straight2 || FC < 3);
                } catch (const std::exception&) {
                }
            }
    }

    if (rep.demoulin) {
        try {
            TzitzeicaReport tz;
            if (env) {
                tz = tzitzeica_test(n, p, *env);
            } else {
                auto e = trace_envelope(n, p, 0, 0, random_generic_seed(n, p, 0, 0, 1));
                tz = tzitzeica_test(n, p, e, 1e-9, 1, 1);
                rep.warnings.push_back("tzitzeica: tested on the canonical faces of a generic envelope (seed row and column excluded)");
            }
            rep.tzitzeica = tz.max_residual < 1e-9 && tz.concurrent;
        } catch (const std::exception& e) {
            rep.warnings.push_back(std::string("tzitzeica: not evaluated: ") + e.what());
        }
    }
    if (rep.tzitzeica.value_or(false) && !rep.demoulin) rep.contradictions.push_back("Tzitzeica but not Demoulin");
    if (rep.demoulin && !rep.godeauxRozet) rep.contradictions.push_back("Demoulin but not Godeaux-Rozet");
    if (rep.qSurface && !(rep.semiQ[0] && rep.semiQ[1])) rep.contradictions.push_back("Q surface but not semi-Q");

    if (rep.tzitzeica.value_or(false)) {
        rep.label = "Tzitzeica";
    } else if (rep.demoulin) {
        rep.label = "Demoulin";
    } else if (rep.godeauxRozet) {
        rep.label = "Godeaux-Rozet";
    } else if (rep.doublyComplex) {
        rep.label = "doubly complex";
    } else if (rep.doublyQ) {
        rep.label = "doubly Q";
    } else if (rep.qSurface) {
        rep.label = "Q surface";
    } else if (rep.complexSurf[0] || rep.complexSurf[1]) {
        rep.label = "complex";
    } else if (rep.semiQ[0] || rep.semiQ[1]) {
        rep.label = "semi-Q";
    } else if (rep.pm) {
        rep.label = "generic PM";
    } else {
        rep.label = "not projective minimal";
    }
    return rep;
}

}  // namespace latticelie
