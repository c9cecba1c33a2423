// Tangency maps between neighbouring quadrics and the PM residuals.
#pragma once

#include "quadric.hpp"

#include <cmath>
#include <optional>

namespace latticelie {

enum class MapKind { S1, T1, S2, T2 };

// Fractional-linear map x -> (m00 x + m01) / (m10 x + m11), up to scale.
// A degenerate map is the constant map onto the image of its matrix.
template <Field S>
struct MoebiusMap {
    Mat<S, 2> m{};
    bool degenerate = false;
};

template <Field S>
MoebiusMap<S> mobius_map(MapKind kind, const LCoeffs<S>& l, const S& p, double tol = 1e-9) {
    MoebiusMap<S> out;
    if (kind == MapKind::S1) {
        S u = l.a1 * l.b2 * p - l.a0 * l.b3;
        out.m = {{{u, S(2) * l.a0 * l.b1 * p}, {S(2) * p * l.a3 * l.b2, -p * u}}};
        out.degenerate = negligible(discriminant1(l, p), discriminant1_scale(l, p), tol);
    } else if (kind == MapKind::T1) {
        out.m = {{{-(l.a1 * l.b2 * p + l.a0 * l.b3), S(2) * l.a0 * l.b2 * p}, {S(2) * l.b2 * p, S(0)}}};
    } else {
        throw std::invalid_argument("mobius_map: S2/T2 need M coefficients");
    }
    return out;
}

template <Field S>
MoebiusMap<S> mobius_map(MapKind kind, const MCoeffs<S>& c, const S& p, double tol = 1e-9) {
    MoebiusMap<S> out;
    if (kind == MapKind::S2) {
        out.m = {{{-(c.g2 * c.d1 * p + c.g0 * c.d3), S(2) * c.g0 * c.d1 * p}, {S(2) * c.d1 * p, S(0)}}};
    } else if (kind == MapKind::T2) {
        S u = c.g2 * c.d1 * p - c.g0 * c.d3;
        out.m = {{{u, S(2) * c.g0 * c.d2 * p}, {S(2) * p * c.g3 * c.d1, -p * u}}};
        out.degenerate = negligible(discriminant2(c, p), discriminant2_scale(c, p), tol);
    } else {
        throw std::invalid_argument("mobius_map: S1/T1 need L coefficients");
    }
    return out;
}

template <Field S>
MoebiusMap<S> mobius_map(MapKind kind, const FrameCoefficients<S>& fc, const S& p, double tol = 1e-9) {
    if (kind == MapKind::S1 || kind == MapKind::T1) return mobius_map(kind, fc.l(), p, tol);
    return mobius_map(kind, fc.m(), p, tol);
}

// The constant image of a degenerate map: its larger column.
template <Field S>
ProjScalar<S> constant_image(const MoebiusMap<S>& f) {
    double c0 = std::hypot(to_double(f.m[0][0]), to_double(f.m[1][0]));
    double c1 = std::hypot(to_double(f.m[0][1]), to_double(f.m[1][1]));
    if (c0 >= c1) return {f.m[0][0], f.m[1][0]};
    return {f.m[0][1], f.m[1][1]};
}

// nullopt when x is (numerically) in the kernel of a degenerate map.
template <Field S>
std::optional<ProjScalar<S>> apply(const MoebiusMap<S>& f, const ProjScalar<S>& x) {
    if (f.degenerate) {
        S a = f.m[0][0] * x.num + f.m[0][1] * x.den;
        S b = f.m[1][0] * x.num + f.m[1][1] * x.den;
        double scale = max_abs(f.m) * std::hypot(to_double(x.num), to_double(x.den));
        if (negligible(a, scale, 1e-9) && negligible(b, scale, 1e-9)) return std::nullopt;
        return constant_image(f);
    }
    ProjScalar<S> y{f.m[0][0] * x.num + f.m[0][1] * x.den, f.m[1][0] * x.num + f.m[1][1] * x.den};
    if constexpr (!is_exact_v<S>) {
        double n = std::hypot(y.num, y.den);
        if (n > 0) {
            y.num /= n;
            y.den /= n;
        }
    }
    return y;
}

template <Field S>
Mat<S, 2> compose(const MoebiusMap<S>& outer, const MoebiusMap<S>& inner) {
    return mat_mul(outer.m, inner.m);
}

// [X, X1, dsQ, dtQ] and [X, X1, ds Q1, dt Q1], each normalized by its column norms.
template <Field S>
std::pair<double, double> tangency_residual(const LatticeQuadric<S>& q, const LatticeQuadric<S>& q1,
                                            const GenParam<S>& g, const GenParam<S>& g1) {
    HomPoint<S> x = quadric_eval(q, g), x1 = quadric_eval(q1, g1);
    if (proj_equal(x, x1, 1e-12)) throw DegeneracyError("tangency_residual: coincident points");
    double da = bracket_normalized(x, x1, quadric_ds(q, g), quadric_dt(q, g));
    double db = bracket_normalized(x, x1, quadric_ds(q1, g1), quadric_dt(q1, g1));
    return {da, db};
}

namespace detail {

template <Field S>
Vec<S, 4> flatten(const Mat<S, 2>& a) {
    return {a[0][0], a[0][1], a[1][0], a[1][1]};
}

// Column space of a rank-one 2x2 matrix.
template <Field S>
Vec<S, 2> image_of(const Mat<S, 2>& a) {
    double c0 = std::hypot(to_double(a[0][0]), to_double(a[1][0]));
    double c1 = std::hypot(to_double(a[0][1]), to_double(a[1][1]));
    if (c0 >= c1) return {a[0][0], a[1][0]};
    return {a[0][1], a[1][1]};
}

template <Field S>
double frob(const Mat<S, 2>& a) {
    double s = 0;
    for (int u = 0; u < 2; ++u)
        for (int v = 0; v < 2; ++v) s += to_double(a[u][v]) * to_double(a[u][v]);
    return std::sqrt(s);
}

// Proportionality of x = a b and y = c d measured against the factors rather
// than the products: each factor counts as unit size. Near-degenerate maps
// make the products small, and rounding in them is bounded by the factors.
template <Field S>
double factor_scaled(const Mat<S, 2>& x, const Mat<S, 2>& y, const MoebiusMap<S>& a, const MoebiusMap<S>& b,
                     const MoebiusMap<S>& c, const MoebiusMap<S>& d) {
    double r = proportionality_residual(flatten(x), flatten(y));
    if (r == 0 || !std::isfinite(r)) return r;
    double f = frob(a.m) * frob(b.m) * frob(c.m) * frob(d.m);
    return r * frob(x) * frob(y) / f;
}

}  // namespace detail

struct ClosureResidual {
    double s = 0, t = 0;
    bool s_image_only = false, t_image_only = false;
    bool applicable = true;
    double value() const { return std::max(s, t); }
};

// Closure of S2(i+1,j) S1(i,j) against S1(i,j+1) S2(i,j) and the same for T,
// compared as matrices up to scale. If a family contains a degenerate
// (constant) map only the images can be compared.
template <Field S>
ClosureResidual pm_residual_maps(const AsymptoticNet<S>& n, const QuadricField<S>& p, int i, int j,
                                 double tol = 1e-9) {
    if (!has_gmc(n, i, j)) throw std::out_of_range("pm_residual_maps outside domain at " + at_index(i, j));
    auto l = frame_l(n, i, j), l2 = frame_l(n, i, j + 1);
    auto m = frame_m(n, i, j), m1 = frame_m(n, i + 1, j);
    ClosureResidual out;
    auto s1 = mobius_map(MapKind::S1, l, p(i, j), tol), s1b = mobius_map(MapKind::S1, l2, p(i, j + 1), tol);
    auto s2 = mobius_map(MapKind::S2, m, p(i, j), tol), s2b = mobius_map(MapKind::S2, m1, p(i + 1, j), tol);
    auto t1 = mobius_map(MapKind::T1, l, p(i, j), tol), t1b = mobius_map(MapKind::T1, l2, p(i, j + 1), tol);
    auto t2 = mobius_map(MapKind::T2, m, p(i, j), tol), t2b = mobius_map(MapKind::T2, m1, p(i + 1, j), tol);
    auto xs = compose(s2b, s1), ys = compose(s1b, s2);
    auto xt = compose(t2b, t1), yt = compose(t1b, t2);
    if (s1.degenerate || s1b.degenerate) {
        out.s_image_only = true;
        out.s = proportionality_residual(detail::image_of(xs), detail::image_of(ys));
    } else {
        out.s = detail::factor_scaled(xs, ys, s2b, s1, s1b, s2);
    }
    if (t2.degenerate || t2b.degenerate) {
        out.t_image_only = true;
        out.t = proportionality_residual(detail::image_of(xt), detail::image_of(yt));
    } else {
        out.t = detail::factor_scaled(xt, yt, t2b, t1, t1b, t2);
    }
    if (!std::isfinite(out.s) || !std::isfinite(out.t)) out.applicable = false;
    return out;
}

// Gauge-scaled invariants. With k = 1 - b1 d2 / (b2 d1) and
// T1 = D1/(a0 b2 p)^2, T2 = D2/(g0 d1 p)^2 in the lift of the net, the
// normalized-gauge differences are, up to positive factors (x1/x)^2, (x2/x)^2:
//   dT1 = (k/p^2) T1(i,j+1) - T1(i,j),   dT2 = (k/p^2) T2(i+1,j) - T2(i,j).
// Only k enters, so these stay real where the normalizing gauge would not be.
template <Field S>
S t1_value(const LCoeffs<S>& l, const S& p) {
    S den = l.a0 * l.b2 * p;
    return discriminant1(l, p) / (den * den);
}

template <Field S>
S t2_value(const MCoeffs<S>& m, const S& p) {
    S den = m.g0 * m.d1 * p;
    return discriminant2(m, p) / (den * den);
}

template <Field S>
struct LocalPm {
    S dT1, dT2, keydisc;
    double dT1_scale, dT2_scale, keydisc_scale;
    double dT1_rel() const { return ratio(dT1, dT1_scale); }
    double dT2_rel() const { return ratio(dT2, dT2_scale); }
    double keydisc_rel() const { return ratio(keydisc, keydisc_scale); }
};

template <Field S>
LocalPm<S> local_pm(const AsymptoticNet<S>& n, const QuadricField<S>& p, int i, int j) {
    if (!has_gmc(n, i, j)) throw std::out_of_range("local_pm outside domain at " + at_index(i, j));
    auto l = frame_l(n, i, j), l2 = frame_l(n, i, j + 1);
    auto m = frame_m(n, i, j), m1 = frame_m(n, i + 1, j);
    const S& pp = p(i, j);
    S k = gauge_k(l, m);
    S w = k / (pp * pp);
    S a1 = w * t1_value(l2, p(i, j + 1)), b1 = t1_value(l, pp);
    S a2 = w * t2_value(m1, p(i + 1, j)), b2 = t2_value(m, pp);
    LocalPm<S> out;
    out.dT1 = a1 - b1;
    out.dT2 = a2 - b2;
    // Scales use the sizes of the terms inside D rather than D itself, so a
    // near-vanishing discriminant does not inflate the relative measure.
    auto sq = [](double x) { return x * x; };
    double aw = std::abs(to_double(w));
    out.dT1_scale = aw * discriminant1_scale(l2, p(i, j + 1)) / sq(to_double(l2.a0 * l2.b2 * p(i, j + 1))) +
                    discriminant1_scale(l, pp) / sq(to_double(l.a0 * l.b2 * pp));
    out.dT2_scale = aw * discriminant2_scale(m1, p(i + 1, j)) / sq(to_double(m1.g0 * m1.d1 * p(i + 1, j))) +
                    discriminant2_scale(m, pp) / sq(to_double(m.g0 * m.d1 * pp));
    S cb = l.b1 / l.b2, cd = m.d2 / m.d1;
    out.keydisc = cb * out.dT2 - cd * out.dT1;
    out.keydisc_scale = std::abs(to_double(cb)) * out.dT2_scale + std::abs(to_double(cd)) * out.dT1_scale;
    return out;
}

// Identity that holds on every asymptotic net.
template <Field S>
double keydisc_residual(const AsymptoticNet<S>& n, const QuadricField<S>& p, int i, int j) {
    return local_pm(n, p, i, j).keydisc_rel();
}

struct PmReport {
    Grid<double> deltaT1, deltaT2, map_closure, keydisc;
    bool gauge_real = false;  // whether normalize_gauge succeeds on this net
    std::string gauge_note;
    GaugeField<double> gauge;  // the normalizing gauge when real
    double max_deltaT1 = 0, max_deltaT2 = 0, max_map_closure = 0, max_keydisc = 0;
    bool pm_gauge = false, pm_maps = false;
    double tol = 0;
};

inline PmReport pm_residual_gauge(const AsymptoticNet<double>& n, const QuadricField<double>& p, double tol = 1e-8) {
    PmReport rep;
    rep.tol = tol;
    const int R = std::max(0, n.rows - 2), C = std::max(0, n.cols - 2);
    rep.deltaT1 = Grid<double>(R, C, 0.0);
    rep.deltaT2 = Grid<double>(R, C, 0.0);
    rep.map_closure = Grid<double>(R, C, 0.0);
    rep.keydisc = Grid<double>(R, C, 0.0);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            auto lp = local_pm(n, p, i, j);
            rep.deltaT1(i, j) = lp.dT1_rel();
            rep.deltaT2(i, j) = lp.dT2_rel();
            rep.keydisc(i, j) = lp.keydisc_rel();
            rep.map_closure(i, j) = pm_residual_maps(n, p, i, j).value();
            rep.max_deltaT1 = std::max(rep.max_deltaT1, rep.deltaT1(i, j));
            rep.max_deltaT2 = std::max(rep.max_deltaT2, rep.deltaT2(i, j));
            rep.max_keydisc = std::max(rep.max_keydisc, rep.keydisc(i, j));
            rep.max_map_closure = std::max(rep.max_map_closure, rep.map_closure(i, j));
        }
    try {
        rep.gauge = normalize_gauge(n, p);
        rep.gauge_real = true;
    } catch (const GaugeError& e) {
        rep.gauge_note = e.what();
    }
    rep.pm_gauge = rep.max_deltaT1 < tol && rep.max_deltaT2 < tol;
    rep.pm_maps = rep.max_map_closure < tol;
    return rep;
}

// Differences of T1, T2 evaluated directly in an explicitly gauged net; used
// to cross-check the local formulas where the normalizing gauge is real.
inline std::pair<double, double> delta_t_in_gauge(const AsymptoticNet<double>& ng, const QuadricField<double>& pg,
                                                  int i, int j) {
    auto l = frame_l(ng, i, j), l2 = frame_l(ng, i, j + 1);
    auto m = frame_m(ng, i, j), m1 = frame_m(ng, i + 1, j);
    double a1 = t1_value(l2, pg(i, j + 1)), b1 = t1_value(l, pg(i, j));
    double a2 = t2_value(m1, pg(i + 1, j)), b2 = t2_value(m, pg(i, j));
    return {std::abs(a1 - b1) / (std::abs(a1) + std::abs(b1)), std::abs(a2 - b2) / (std::abs(a2) + std::abs(b2))};
}

}  // namespace latticelie
