// Lattice Lie quadrics: parametrisation, C1 propagation, shared generators.
#pragma once

#include "net.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace latticelie {

// Projective scalar (num : den); den == 0 is infinity.
template <Field S>
struct ProjScalar {
    S num{1}, den{1};

    static ProjScalar affine(const S& x) { return {x, S(1)}; }
    static ProjScalar infinity() { return {S(1), S(0)}; }
    bool is_infinite(double tol = 0.0) const {
        return negligible(den, std::max(std::abs(to_double(num)), std::abs(to_double(den))), tol);
    }
    S value() const { return num / den; }
};

template <Field S>
struct GenParam {
    ProjScalar<S> s, t;
    static GenParam affine(const S& s, const S& t) { return {ProjScalar<S>::affine(s), ProjScalar<S>::affine(t)}; }
};

// The quadric of face (i, j) with corners r = (i,j), r1 = (i+1,j),
// r2 = (i,j+1), r12 = (i+1,j+1).
template <Field S>
struct LatticeQuadric {
    int i = 0, j = 0;
    S p{1};
    HomPoint<S> r, r1, r2, r12;
};

template <Field S>
using QuadricField = Grid<S>;

template <Field S>
LatticeQuadric<S> make_quadric(const AsymptoticNet<S>& n, int i, int j, const S& p) {
    if (p == S(0)) throw std::invalid_argument("quadric parameter p must be nonzero");
    return {i, j, p, n(i, j), n(i + 1, j), n(i, j + 1), n(i + 1, j + 1)};
}

template <Field S>
LatticeQuadric<S> make_quadric(const AsymptoticNet<S>& n, const QuadricField<S>& f, int i, int j) {
    return make_quadric(n, i, j, f(i, j));
}

// p s1 t1 r12 + s0 t1 r1 + s1 t0 r2 + s0 t0 r, i.e. p r12 + s r1 + t r2 + s t r.
template <Field S>
HomPoint<S> quadric_eval(const LatticeQuadric<S>& q, const GenParam<S>& g) {
    const S &s0 = g.s.num, &s1 = g.s.den, &t0 = g.t.num, &t1 = g.t.den;
    return (q.p * s1 * t1) * q.r12 + (s0 * t1) * q.r1 + (s1 * t0) * q.r2 + (s0 * t0) * q.r;
}

// Derivatives along the s and t rulings in homogeneous form.
template <Field S>
HomPoint<S> quadric_ds(const LatticeQuadric<S>& q, const GenParam<S>& g) {
    const S &s0 = g.s.num, &s1 = g.s.den, &t0 = g.t.num, &t1 = g.t.den;
    HomPoint<S> d0 = t1 * q.r1 + t0 * q.r;
    HomPoint<S> d1 = (q.p * t1) * q.r12 + t0 * q.r2;
    return S(-s1) * d0 + s0 * d1;
}

template <Field S>
HomPoint<S> quadric_dt(const LatticeQuadric<S>& q, const GenParam<S>& g) {
    const S &s0 = g.s.num, &s1 = g.s.den, &t0 = g.t.num, &t1 = g.t.den;
    HomPoint<S> d0 = s1 * q.r2 + s0 * q.r;
    HomPoint<S> d1 = (q.p * s1) * q.r12 + s0 * q.r1;
    return S(-t1) * d0 + t0 * d1;
}

template <Field S>
ProjPlane<S> tangent_plane(const LatticeQuadric<S>& q, const GenParam<S>& g, double tol = 1e-12) {
    return plane_through(quadric_eval(q, g), quadric_ds(q, g), quadric_dt(q, g), tol);
}

// The ruling with fixed s (t varies) and the ruling with fixed t.
template <Field S>
ProjLine<S> s_generator(const LatticeQuadric<S>& q, const ProjScalar<S>& s) {
    return line_through((q.p * s.den) * q.r12 + s.num * q.r1, s.den * q.r2 + s.num * q.r, 0.0);
}

template <Field S>
ProjLine<S> t_generator(const LatticeQuadric<S>& q, const ProjScalar<S>& t) {
    return line_through((q.p * t.den) * q.r12 + t.num * q.r2, t.den * q.r1 + t.num * q.r, 0.0);
}

// Direction 1 uses L at the face, direction 2 uses M.
template <Field S>
S c1_step(const S& p, const LCoeffs<S>& l) {
    if (p == S(0) || l.b2 == S(0)) throw DegeneracyError("c1_step: zero denominator");
    return l.a0 / (l.b2 * p);
}

template <Field S>
S c1_step(const S& p, const MCoeffs<S>& m) {
    if (p == S(0) || m.d1 == S(0)) throw DegeneracyError("c1_step: zero denominator");
    return m.g0 / (m.d1 * p);
}

template <Field S>
S c1_step(const LatticeQuadric<S>& q, const FrameCoefficients<S>& fc, int direction) {
    return direction == 1 ? c1_step(q.p, fc.l()) : c1_step(q.p, fc.m());
}

struct PropagationReport {
    double max_diagonal_mismatch = 0;
    int worst_i = -1, worst_j = -1;
};

// Fills the face field from one face by C1 steps (the step is an involution,
// so it also runs backwards) and checks both paths to every diagonal face.
template <Field S>
QuadricField<S> propagate_quadrics(const AsymptoticNet<S>& n, int si, int sj, const S& p0, double tol = 1e-10,
                                   PropagationReport* report = nullptr) {
    if (p0 == S(0)) throw std::invalid_argument("propagate_quadrics: p0 must be nonzero");
    const int fr = n.rows - 1, fc = n.cols - 1;
    if (si < 0 || sj < 0 || si >= fr || sj >= fc) throw std::out_of_range("propagate_quadrics: seed face outside net");
    QuadricField<S> p(fr, fc, S(0));
    p(si, sj) = p0;
    for (int i = si + 1; i < fr; ++i) p(i, sj) = c1_step(p(i - 1, sj), frame_l(n, i - 1, sj));
    for (int i = si - 1; i >= 0; --i) p(i, sj) = c1_step(p(i + 1, sj), frame_l(n, i, sj));
    for (int i = 0; i < fr; ++i) {
        for (int j = sj + 1; j < fc; ++j) p(i, j) = c1_step(p(i, j - 1), frame_m(n, i, j - 1));
        for (int j = sj - 1; j >= 0; --j) p(i, j) = c1_step(p(i, j + 1), frame_m(n, i, j));
    }
    PropagationReport rep;
    for (int i = 0; i + 1 < fr; ++i)
        for (int j = 0; j + 1 < fc; ++j) {
            S via1 = c1_step(p(i + 1, j), frame_m(n, i + 1, j));
            S via2 = c1_step(p(i, j + 1), frame_l(n, i, j + 1));
            double mis = ratio(S(via1 - via2), std::abs(to_double(via1)));
            if (mis > rep.max_diagonal_mismatch) {
                rep.max_diagonal_mismatch = mis;
                rep.worst_i = i + 1;
                rep.worst_j = j + 1;
            }
        }
    if (report) *report = rep;
    if (rep.max_diagonal_mismatch > (is_exact_v<S> ? 0.0 : tol))
        throw ConsistencyError("propagate_quadrics: diagonal paths disagree at face " +
                               at_index(rep.worst_i, rep.worst_j));
    return p;
}

template <Field S>
S discriminant1(const LCoeffs<S>& l, const S& p) {
    S b = l.a0 * l.b3 - l.a1 * l.b2 * p;
    return b * b + S(4) * l.a0 * l.a3 * l.b1 * l.b2 * p;
}

template <Field S>
S discriminant2(const MCoeffs<S>& m, const S& p) {
    S b = m.g0 * m.d3 - m.g2 * m.d1 * p;
    return b * b + S(4) * m.g0 * m.g3 * m.d1 * m.d2 * p;
}

// Scale used by the D = 0 threshold.
template <Field S>
double discriminant1_scale(const LCoeffs<S>& l, const S& p) {
    double v = std::abs(to_double(l.a0 * l.b3)) + std::abs(to_double(l.a1 * l.b2 * p));
    double w = 2 * std::sqrt(std::abs(to_double(l.a0 * l.a3 * l.b1 * l.b2 * p)));
    return std::pow(std::max(v, w), 2);
}

template <Field S>
double discriminant2_scale(const MCoeffs<S>& m, const S& p) {
    double v = std::abs(to_double(m.g0 * m.d3)) + std::abs(to_double(m.g2 * m.d1 * p));
    double w = 2 * std::sqrt(std::abs(to_double(m.g0 * m.g3 * m.d1 * m.d2 * p)));
    return std::pow(std::max(v, w), 2);
}

// Quadratic A x^2 + B x + C whose roots label the shared generators.
// Direction 1: s-rulings, A = a3 b2, B = a0 b3 - a1 b2 p, C = -a0 b1 p.
// Direction 2: t-rulings with the index swap.
template <Field S>
std::array<S, 3> sharegen_quadratic(const LCoeffs<S>& l, const S& p) {
    return {l.a3 * l.b2, l.a0 * l.b3 - l.a1 * l.b2 * p, -l.a0 * l.b1 * p};
}

template <Field S>
std::array<S, 3> sharegen_quadratic(const MCoeffs<S>& m, const S& p) {
    return {m.g3 * m.d1, m.g0 * m.d3 - m.g2 * m.d1 * p, -m.g0 * m.d2 * p};
}

struct SharedGenerators {
    double D = 0;
    double scale = 1;
    bool zero_discriminant = false;
    bool degree_drop = false;  // leading coefficient vanished; one root at infinity
    int multiplicity = 0;      // 2 for a double root
    std::vector<ProjScalar<double>> roots;
};

inline SharedGenerators solve_sharegen(const std::array<double, 3>& q, double D, double scale, double tol) {
    SharedGenerators out;
    out.D = D;
    out.scale = scale;
    const double A = q[0], B = q[1], C = q[2];
    double coef_scale = std::max({std::abs(A), std::abs(B), std::abs(C)});
    if (std::abs(A) <= 1e-14 * coef_scale) {
        out.degree_drop = true;
        out.roots.push_back(ProjScalar<double>::infinity());
        if (B != 0.0) out.roots.push_back({-C, B});
        out.multiplicity = 1;
        return out;
    }
    if (std::abs(D) <= tol * scale) {
        out.zero_discriminant = true;
        out.multiplicity = 2;
        out.roots.push_back({-B, 2 * A});
        return out;
    }
    if (D < 0) return out;
    double sq = std::sqrt(D);
    double qq = -0.5 * (B + (B >= 0 ? sq : -sq));
    out.multiplicity = 1;
    out.roots.push_back({qq, A});
    out.roots.push_back({C, qq});
    return out;
}

inline SharedGenerators shared_generators(const LatticeQuadric<double>& q, const LCoeffs<double>& l,
                                          double tol = 1e-9) {
    return solve_sharegen(sharegen_quadratic(l, q.p), discriminant1(l, q.p), discriminant1_scale(l, q.p), tol);
}

inline SharedGenerators shared_generators(const LatticeQuadric<double>& q, const MCoeffs<double>& m,
                                          double tol = 1e-9) {
    return solve_sharegen(sharegen_quadratic(m, q.p), discriminant2(m, q.p), discriminant2_scale(m, q.p), tol);
}

inline SharedGenerators shared_generators(const LatticeQuadric<double>& q, const FrameCoefficients<double>& fc,
                                          int direction, double tol = 1e-9) {
    return direction == 1 ? shared_generators(q, fc.l(), tol) : shared_generators(q, fc.m(), tol);
}

// Label on the neighbour quadric of a shared generator found on q: s / p.
template <Field S>
ProjScalar<S> neighbour_label(const ProjScalar<S>& x, const S& p) {
    return {x.num, x.den * p};
}

// |X^T A X| / (|A| |X|^2).
template <Field S>
double implicit_residual(const Mat<S, 4>& a, const HomPoint<S>& x) {
    S acc(0);
    for (int u = 0; u < 4; ++u)
        for (int v = 0; v < 4; ++v) acc += x[u] * a[u][v] * x[v];
    double n = norm(x);
    return ratio(acc, max_abs(a) * n * n);
}

// Symmetric A with X^T A X = 0 on the quadric. In frame coordinates
// X = y0 r + y1 r1 + y2 r2 + y3 r12 the form is y0 y3 - p y1 y2.
template <Field S>
Mat<S, 4> implicit_quadric(const LatticeQuadric<S>& q, double verify_tol = 1e-10) {
    Mat<S, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = {q.r[k], q.r1[k], q.r2[k], q.r12[k]};
    if (negligible(det(b), norm(q.r) * norm(q.r1) * norm(q.r2) * norm(q.r12), 1e-13))
        throw DegeneracyError("implicit_quadric: corners dependent");
    Mat<S, 4> binv;
    for (int k = 0; k < 4; ++k) {
        Vec<S, 4> e{};
        e[k] = S(1);
        auto z = solve(b, e);  // column k of B^{-1}
        if (!z) throw DegeneracyError("implicit_quadric: corners dependent");
        for (int x = 0; x < 4; ++x) binv[x][k] = (*z)[x];
    }
    const S half = S(1) / S(2);
    Mat<S, 4> ay{};
    for (auto& row : ay) row.fill(S(0));
    ay[0][3] = ay[3][0] = half;
    ay[1][2] = ay[2][1] = -q.p * half;
    Mat<S, 4> a{};
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
            S acc(0);
            for (int u = 0; u < 4; ++u)
                for (int v = 0; v < 4; ++v) acc += binv[u][x] * ay[u][v] * binv[v][y];
            a[x][y] = acc;
        }
    // Held-out check on sampled parameters.
    for (int k = 0; k < 20; ++k) {
        GenParam<S> g = GenParam<S>::affine(S(k % 5 - 2) / S(3) + S(1) / S(7), S(k / 5 - 2) / S(5) + S(1) / S(11));
        if (implicit_residual(a, quadric_eval(q, g)) > (is_exact_v<S> ? 0.0 : verify_tol))
            throw ConsistencyError("implicit_quadric: verification failed");
    }
    return a;
}

}  // namespace latticelie
