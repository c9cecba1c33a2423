// Points, planes and lines of real projective 3-space.
//
// Lines use Plücker coordinates in the order (p01, p02, p03, p23, p31, p12)
// where p_ij = a_i b_j - a_j b_i for the line through a and b.
#pragma once

#include "linalg.hpp"

#include <array>
#include <cmath>

namespace latticelie {

template <Field S>
struct HomPoint {
    std::array<S, 4> c{};

    HomPoint() = default;
    HomPoint(S x0, S x1, S x2, S x3) : c{x0, x1, x2, x3} {}
    explicit HomPoint(const std::array<S, 4>& v) : c(v) {}

    const S& operator[](int i) const { return c[i]; }
    S& operator[](int i) { return c[i]; }

    friend HomPoint operator+(const HomPoint& a, const HomPoint& b) {
        return HomPoint(a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]);
    }
    friend HomPoint operator-(const HomPoint& a, const HomPoint& b) {
        return HomPoint(a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]);
    }
    friend HomPoint operator*(const S& k, const HomPoint& a) {
        return HomPoint(k * a[0], k * a[1], k * a[2], k * a[3]);
    }
    bool operator==(const HomPoint&) const = default;
};

template <Field S>
struct ProjPlane {
    std::array<S, 4> c{};
    const S& operator[](int i) const { return c[i]; }
    S& operator[](int i) { return c[i]; }
};

template <Field S>
struct ProjLine {
    std::array<S, 6> p{};
    const S& operator[](int i) const { return p[i]; }
};

template <Field S>
HomPoint<S> basis_point(int k) {
    HomPoint<S> e(S(0), S(0), S(0), S(0));
    e[k] = S(1);
    return e;
}

template <Field S>
double norm(const HomPoint<S>& a) { return norm2(a.c); }
template <Field S>
double norm(const ProjPlane<S>& a) { return norm2(a.c); }
template <Field S>
double norm(const ProjLine<S>& a) { return norm2(a.p); }

template <Field S>
S dot(const ProjPlane<S>& w, const HomPoint<S>& x) {
    return w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3];
}

// Unit norm in float mode; a primitive integer vector in exact mode.
template <Field S>
HomPoint<S> normalized(const HomPoint<S>& a) {
    if constexpr (is_exact_v<S>) {
        BigInt l(1), g(0);
        for (auto& v : a.c) {
            BigInt d = boost::multiprecision::denominator(v);
            l = l / boost::multiprecision::gcd(l, d) * d;
        }
        std::array<BigInt, 4> n;
        for (int i = 0; i < 4; ++i) {
            n[i] = boost::multiprecision::numerator(a[i]) * (l / boost::multiprecision::denominator(a[i]));
            g = boost::multiprecision::gcd(g, boost::multiprecision::abs(n[i]));
        }
        if (g == 0) throw DegeneracyError("zero vector");
        HomPoint<S> r;
        for (int i = 0; i < 4; ++i) r[i] = S(n[i] / g);
        return r;
    } else {
        double n = norm(a);
        if (n == 0.0) throw DegeneracyError("zero vector");
        return HomPoint<S>(a[0] / n, a[1] / n, a[2] / n, a[3] / n);
    }
}

template <Field S>
S bracket(const HomPoint<S>& a, const HomPoint<S>& b, const HomPoint<S>& c, const HomPoint<S>& d) {
    return det<S, 4>(Mat<S, 4>{a.c, b.c, c.c, d.c});
}

// |[a,b,c,d]| divided by the product of the four norms.
template <Field S>
double bracket_normalized(const HomPoint<S>& a, const HomPoint<S>& b, const HomPoint<S>& c,
                          const HomPoint<S>& d) {
    return ratio(bracket(a, b, c, d), norm(a) * norm(b) * norm(c) * norm(d));
}

namespace detail {
// The cofactor plane through three points, without a degeneracy check.
template <Field S>
ProjPlane<S> cofactor_plane(const HomPoint<S>& a, const HomPoint<S>& b, const HomPoint<S>& c) {
    ProjPlane<S> w;
    for (int k = 0; k < 4; ++k) w[k] = bracket(a, b, c, basis_point<S>(k));
    return w;
}
}  // namespace detail

template <Field S>
ProjPlane<S> plane_through(const HomPoint<S>& a, const HomPoint<S>& b, const HomPoint<S>& c,
                           double tol = 1e-12) {
    ProjPlane<S> w = detail::cofactor_plane(a, b, c);
    double scale = norm(a) * norm(b) * norm(c);
    bool zero = true;
    for (auto& v : w.c) zero = zero && negligible(v, scale, tol);
    if (zero) throw DegeneracyError("plane_through: points are collinear or coincident");
    return w;
}

namespace detail {
template <Field S>
ProjLine<S> wedge(const HomPoint<S>& a, const HomPoint<S>& b) {
    ProjLine<S> l;
    l.p = {a[0] * b[1] - a[1] * b[0], a[0] * b[2] - a[2] * b[0], a[0] * b[3] - a[3] * b[0],
           a[2] * b[3] - a[3] * b[2], a[3] * b[1] - a[1] * b[3], a[1] * b[2] - a[2] * b[1]};
    return l;
}
}  // namespace detail

template <Field S>
ProjLine<S> line_through(const HomPoint<S>& a, const HomPoint<S>& b, double tol = 1e-12) {
    ProjLine<S> l = detail::wedge(a, b);
    double scale = norm(a) * norm(b);
    bool zero = true;
    for (auto& v : l.p) zero = zero && negligible(v, scale, tol);
    if (zero) throw DegeneracyError("line_through: coincident points");
    return l;
}

// Common line of two planes.
template <Field S>
ProjLine<S> meet(const ProjPlane<S>& u, const ProjPlane<S>& v, double tol = 1e-12) {
    auto q = [&](int i, int j) { return u[i] * v[j] - u[j] * v[i]; };
    ProjLine<S> l;
    l.p = {q(2, 3), q(3, 1), q(1, 2), q(0, 1), q(0, 2), q(0, 3)};
    double scale = norm(u) * norm(v);
    bool zero = true;
    for (auto& x : l.p) zero = zero && negligible(x, scale, tol);
    if (zero) throw DegeneracyError("meet: planes coincide");
    return l;
}

// Antisymmetric 4x4 forms. primal_matrix(l) * w is the point where l meets w;
// dual_matrix(l) * X is the plane spanned by l and X.
template <Field S>
Mat<S, 4> primal_matrix(const ProjLine<S>& l) {
    const S z(0);
    return Mat<S, 4>{{{z, l[0], l[1], l[2]},
                      {-l[0], z, l[5], -l[4]},
                      {-l[1], -l[5], z, l[3]},
                      {-l[2], l[4], -l[3], z}}};
}

template <Field S>
Mat<S, 4> dual_matrix(const ProjLine<S>& l) {
    const S z(0);
    return Mat<S, 4>{{{z, l[3], l[4], l[5]},
                      {-l[3], z, l[2], -l[1]},
                      {-l[4], -l[2], z, l[0]},
                      {-l[5], l[1], -l[0], z}}};
}

template <Field S>
HomPoint<S> line_meet_plane(const ProjLine<S>& l, const ProjPlane<S>& w) {
    auto m = primal_matrix(l);
    HomPoint<S> x;
    for (int i = 0; i < 4; ++i) {
        S acc(0);
        for (int j = 0; j < 4; ++j) acc += m[i][j] * w[j];
        x[i] = acc;
    }
    return x;
}

template <Field S>
ProjPlane<S> plane_line_point(const ProjLine<S>& l, const HomPoint<S>& x) {
    auto m = dual_matrix(l);
    ProjPlane<S> w;
    for (int i = 0; i < 4; ++i) {
        S acc(0);
        for (int j = 0; j < 4; ++j) acc += m[i][j] * x[j];
        w[i] = acc;
    }
    return w;
}

template <Field S>
S pairing(const ProjLine<S>& l, const ProjLine<S>& m) {
    return l[0] * m[3] + l[1] * m[4] + l[2] * m[5] + l[3] * m[0] + l[4] * m[1] + l[5] * m[2];
}

template <Field S>
double pairing_normalized(const ProjLine<S>& l, const ProjLine<S>& m) {
    return ratio(pairing(l, m), norm(l) * norm(m));
}

template <Field S>
bool lines_intersect(const ProjLine<S>& l, const ProjLine<S>& m, double tol = 1e-10) {
    return negligible(pairing(l, m), norm(l) * norm(m), tol);
}

// Largest 2x2 minor of the stacked pair, divided by the product of norms.
template <Field S, std::size_t N>
double proportionality_residual(const std::array<S, N>& a, const std::array<S, N>& b) {
    double na = norm2(a), nb = norm2(b);
    if (na == 0.0 || nb == 0.0) return INFINITY;
    double worst = 0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) worst = std::max(worst, ratio(S(a[i] * b[j] - a[j] * b[i]), na * nb));
    return worst;
}

template <Field S>
bool lines_coincide(const ProjLine<S>& l, const ProjLine<S>& m, double tol = 1e-10) {
    return proportionality_residual(l.p, m.p) <= (is_exact_v<S> ? 0.0 : tol);
}

template <Field S>
bool proj_equal(const HomPoint<S>& a, const HomPoint<S>& b, double tol = 1e-10) {
    return proportionality_residual(a.c, b.c) <= (is_exact_v<S> ? 0.0 : tol);
}

template <Field S>
double point_on_line_residual(const ProjLine<S>& l, const HomPoint<S>& x) {
    ProjPlane<S> w = plane_line_point(l, x);
    double m = 0;
    for (auto& v : w.c) m = std::max(m, ratio(v, norm(l) * norm(x)));
    return m;
}

template <Field S>
double incidence_residual(const ProjPlane<S>& w, const HomPoint<S>& x) {
    return ratio(dot(w, x), norm(w) * norm(x));
}

// Intersection point of two lines assumed to meet. A plane through m is
// chosen so that it does not contain l, which keeps the result away from zero.
template <Field S>
HomPoint<S> intersect_lines(const ProjLine<S>& l, const ProjLine<S>& m) {
    HomPoint<S> best;
    double best_n = -1;
    for (int k = 0; k < 4; ++k) {
        ProjPlane<S> w = plane_line_point(m, basis_point<S>(k));
        HomPoint<S> x = line_meet_plane(l, w);
        double n = norm(x) / std::max(norm(w), 1e-300);
        if (n > best_n) {
            best_n = n;
            best = x;
        }
    }
    if (best_n <= 0) throw DegeneracyError("intersect_lines: lines coincide or are degenerate");
    return best;
}

// Two distinct points spanning a line, taken from the primal matrix columns.
template <Field S>
std::pair<HomPoint<S>, HomPoint<S>> points_on_line(const ProjLine<S>& l) {
    auto m = primal_matrix(l);
    std::array<HomPoint<S>, 4> cols;
    for (int k = 0; k < 4; ++k)
        for (int i = 0; i < 4; ++i) cols[k][i] = m[i][k];
    int bi = -1, bj = -1;
    double best = -1;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) {
            double nc = norm(cols[i]) * norm(cols[j]);
            if (nc == 0) continue;
            auto pl = detail::wedge(cols[i], cols[j]);
            bool nz = false;
            for (auto& x : pl.p) nz = nz || x != S(0);
            if (!nz) continue;
            double v = norm(pl) / nc;
            if (v > best) {
                best = v;
                bi = i;
                bj = j;
            }
        }
    if (bi < 0) throw DegeneracyError("points_on_line: zero line");
    return {cols[bi], cols[bj]};
}

}  // namespace latticelie
