// Discrete asymptotic nets, frame coefficients, compatibility and gauges.
#pragma once

#include "projcore.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace latticelie {

// Row-major R x C array; index (i, j) is (n1, n2).
template <class T>
struct Grid {
    int rows = 0, cols = 0;
    std::vector<T> v;

    Grid() = default;
    Grid(int r, int c, const T& fill = T()) : rows(r), cols(c), v(std::size_t(r) * c, fill) {}

    T& operator()(int i, int j) { return v[std::size_t(i) * cols + j]; }
    const T& operator()(int i, int j) const { return v[std::size_t(i) * cols + j]; }
    bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < rows && j < cols; }
};

template <Field S>
using AsymptoticNet = Grid<HomPoint<S>>;

template <Field S>
using GaugeField = Grid<S>;

// r11 = a0 r + a1 r1 + a3 r12,  r112 = b1 r1 + b2 r2 + b3 r12
template <Field S>
struct LCoeffs {
    S a0, a1, a3, b1, b2, b3;
};

// r22 = g0 r + g2 r2 + g3 r12,  r122 = d1 r1 + d2 r2 + d3 r12
template <Field S>
struct MCoeffs {
    S g0, g2, g3, d1, d2, d3;
};

template <Field S>
struct FrameCoefficients {
    S a0, a1, a3, b1, b2, b3, g0, g2, g3, d1, d2, d3;

    LCoeffs<S> l() const { return {a0, a1, a3, b1, b2, b3}; }
    MCoeffs<S> m() const { return {g0, g2, g3, d1, d2, d3}; }
    static FrameCoefficients join(const LCoeffs<S>& l, const MCoeffs<S>& m) {
        return {l.a0, l.a1, l.a3, l.b1, l.b2, l.b3, m.g0, m.g2, m.g3, m.d1, m.d2, m.d3};
    }
};

inline constexpr double kStructuralTol = 1e-9;

template <class T>
bool has_l(const Grid<T>& n, int i, int j) { return i >= 0 && j >= 0 && i + 2 < n.rows && j + 1 < n.cols; }
template <class T>
bool has_m(const Grid<T>& n, int i, int j) { return i >= 0 && j >= 0 && i + 1 < n.rows && j + 2 < n.cols; }
template <class T>
bool has_frame(const Grid<T>& n, int i, int j) { return has_l(n, i, j) && has_m(n, i, j); }
// Compatibility needs both shifts of the frame.
template <class T>
bool has_gmc(const Grid<T>& n, int i, int j) { return i >= 0 && j >= 0 && i + 2 < n.rows && j + 2 < n.cols; }

namespace detail {

// Coordinates of x in the basis {r, r1, r2, r12} at (i, j).
template <Field S>
Vec<S, 4> frame_coords(const AsymptoticNet<S>& n, int i, int j, const HomPoint<S>& x) {
    const auto &r = n(i, j), &r1 = n(i + 1, j), &r2 = n(i, j + 1), &r12 = n(i + 1, j + 1);
    Mat<S, 4> b;
    for (int k = 0; k < 4; ++k) b[k] = {r[k], r1[k], r2[k], r12[k]};
    double scale = norm(r) * norm(r1) * norm(r2) * norm(r12);
    if (negligible(det(b), scale, 1e-13))
        throw DegeneracyError("frame basis degenerate at " + at_index(i, j));
    auto y = solve(b, x.c);
    if (!y) throw DegeneracyError("frame basis degenerate at " + at_index(i, j));
    return *y;
}

template <Field S>
void check_structural(const Vec<S, 4>& y, int zero_slot, double tol, const char* what, int i, int j) {
    if (tol >= 1.0) return;  // unchecked, in either backend
    double m = max_abs(y);
    if (!negligible(y[zero_slot], m, tol))
        throw NotAsymptoticError(std::string("structural zero violated for ") + what + " at " + at_index(i, j));
}

}  // namespace detail

template <Field S>
LCoeffs<S> frame_l(const AsymptoticNet<S>& n, int i, int j, double tol = kStructuralTol) {
    if (!has_l(n, i, j)) throw std::out_of_range("frame_l outside domain at " + at_index(i, j));
    auto y = detail::frame_coords(n, i, j, n(i + 2, j));
    detail::check_structural(y, 2, tol, "r11", i, j);
    auto z = detail::frame_coords(n, i, j, n(i + 2, j + 1));
    detail::check_structural(z, 0, tol, "r112", i, j);
    return {y[0], y[1], y[3], z[1], z[2], z[3]};
}

template <Field S>
MCoeffs<S> frame_m(const AsymptoticNet<S>& n, int i, int j, double tol = kStructuralTol) {
    if (!has_m(n, i, j)) throw std::out_of_range("frame_m outside domain at " + at_index(i, j));
    auto y = detail::frame_coords(n, i, j, n(i, j + 2));
    detail::check_structural(y, 1, tol, "r22", i, j);
    auto z = detail::frame_coords(n, i, j, n(i + 1, j + 2));
    detail::check_structural(z, 0, tol, "r122", i, j);
    return {y[0], y[2], y[3], z[1], z[2], z[3]};
}

template <Field S>
FrameCoefficients<S> frame_coefficients(const AsymptoticNet<S>& n, int i, int j, double tol = kStructuralTol) {
    return FrameCoefficients<S>::join(frame_l(n, i, j, tol), frame_m(n, i, j, tol));
}

// Frame transfer matrices acting on the column (r, r1, r2, r12).
template <Field S>
Mat<S, 4> l_matrix(const LCoeffs<S>& c) {
    const S z(0), o(1);
    return Mat<S, 4>{{{z, o, z, z}, {c.a0, c.a1, z, c.a3}, {z, z, z, o}, {z, c.b1, c.b2, c.b3}}};
}

template <Field S>
Mat<S, 4> m_matrix(const MCoeffs<S>& c) {
    const S z(0), o(1);
    return Mat<S, 4>{{{z, z, o, z}, {z, z, z, o}, {c.g0, z, c.g2, c.g3}, {z, c.d1, c.d2, c.d3}}};
}

// a1, b3, g2, d3 may vanish; the other coefficients must not.
template <Field S>
double l_health(const LCoeffs<S>& c) {
    double mx = std::max({std::abs(to_double(c.a0)), std::abs(to_double(c.a1)), std::abs(to_double(c.a3)),
                          std::abs(to_double(c.b1)), std::abs(to_double(c.b2)), std::abs(to_double(c.b3))});
    double mn = std::min({std::abs(to_double(c.a0)), std::abs(to_double(c.a3)), std::abs(to_double(c.b1)),
                          std::abs(to_double(c.b2))});
    if constexpr (is_exact_v<S>) {
        if (c.a0 == 0 || c.a3 == 0 || c.b1 == 0 || c.b2 == 0) return 0.0;
    }
    return mx > 0 ? mn / mx : 0.0;
}

template <Field S>
double m_health(const MCoeffs<S>& c) {
    double mx = std::max({std::abs(to_double(c.g0)), std::abs(to_double(c.g2)), std::abs(to_double(c.g3)),
                          std::abs(to_double(c.d1)), std::abs(to_double(c.d2)), std::abs(to_double(c.d3))});
    double mn = std::min({std::abs(to_double(c.g0)), std::abs(to_double(c.g3)), std::abs(to_double(c.d1)),
                          std::abs(to_double(c.d2))});
    if constexpr (is_exact_v<S>) {
        if (c.g0 == 0 || c.g3 == 0 || c.d1 == 0 || c.d2 == 0) return 0.0;
    }
    return mx > 0 ? mn / mx : 0.0;
}

// M(i+1,j) L(i,j) - L(i,j+1) M(i,j).
template <Field S>
Mat<S, 4> gmc_residual(const LCoeffs<S>& l, const LCoeffs<S>& l2, const MCoeffs<S>& m, const MCoeffs<S>& m1) {
    auto a = mat_mul(m_matrix(m1), l_matrix(l));
    auto b = mat_mul(l_matrix(l2), m_matrix(m));
    Mat<S, 4> r;
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) r[x][y] = a[x][y] - b[x][y];
    return r;
}

template <Field S>
Mat<S, 4> gmc_residual(const AsymptoticNet<S>& n, int i, int j) {
    if (!has_gmc(n, i, j)) throw std::out_of_range("gmc_residual outside domain at " + at_index(i, j));
    return gmc_residual(frame_l(n, i, j), frame_l(n, i, j + 1), frame_m(n, i, j), frame_m(n, i + 1, j));
}

// Largest residual entry over the largest entry of either product.
template <Field S>
double gmc_residual_normalized(const AsymptoticNet<S>& n, int i, int j) {
    auto l = frame_l(n, i, j), l2 = frame_l(n, i, j + 1);
    auto m = frame_m(n, i, j), m1 = frame_m(n, i + 1, j);
    auto r = gmc_residual(l, l2, m, m1);
    double scale = std::max(max_abs(mat_mul(m_matrix(m1), l_matrix(l))), max_abs(mat_mul(l_matrix(l2), m_matrix(m))));
    double worst = 0;
    for (auto& row : r)
        for (auto& v : row) worst = std::max(worst, ratio(v, scale));
    return worst;
}

struct ValidationReport {
    bool passed = true;
    double max_planarity = 0;
    int worst_i = -1, worst_j = -1;
    std::vector<std::pair<int, int>> nonplanar;
    std::vector<std::pair<int, int>> collinear;
    Grid<double> planarity;
    double tol = 0;
    std::string message;
};

// Star planarity: largest normalized 4x4 minor among the vertex and its
// neighbours. Collinearity: any two edges at a vertex spanning a degenerate
// triple.
template <Field S>
ValidationReport validate_asymptotic(const AsymptoticNet<S>& n, double tol = 1e-9, double collinear_tol = 1e-9) {
    if (n.rows < 3 || n.cols < 3) throw std::invalid_argument("validate_asymptotic: grid must be at least 3x3");
    ValidationReport rep;
    rep.tol = tol;
    rep.planarity = Grid<double>(n.rows, n.cols, 0.0);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int i = 0; i < n.rows; ++i)
        for (int j = 0; j < n.cols; ++j) {
            std::vector<HomPoint<S>> star{n(i, j)};
            for (int k = 0; k < 4; ++k)
                if (n.contains(i + di[k], j + dj[k])) star.push_back(n(i + di[k], j + dj[k]));
            double res = 0;
            if (star.size() >= 4) {
                for (std::size_t a = 0; a < star.size(); ++a) {
                    std::vector<HomPoint<S>> q;
                    for (std::size_t b = 0; b < star.size(); ++b)
                        if (b != a) q.push_back(star[b]);
                    if (q.size() == 4) res = std::max(res, bracket_normalized(q[0], q[1], q[2], q[3]));
                    if (star.size() == 4) break;
                }
            }
            rep.planarity(i, j) = res;
            if (res > rep.max_planarity) {
                rep.max_planarity = res;
                rep.worst_i = i;
                rep.worst_j = j;
            }
            if (res > (is_exact_v<S> ? 0.0 : tol)) rep.nonplanar.push_back({i, j});
            for (std::size_t a = 1; a < star.size(); ++a)
                for (std::size_t b = a + 1; b < star.size(); ++b) {
                    auto wedge = detail::cofactor_plane(star[a], star[0], star[b]);
                    double sc = norm(star[a]) * norm(star[0]) * norm(star[b]);
                    bool zero = true;
                    for (auto& v : wedge.c) zero = zero && negligible(v, sc, collinear_tol);
                    if (zero) {
                        rep.collinear.push_back({i, j});
                        a = star.size();
                        break;
                    }
                }
        }
    rep.passed = rep.nonplanar.empty() && rep.collinear.empty();
    if (!rep.nonplanar.empty())
        rep.message = "non-planar star at " + at_index(rep.nonplanar[0].first, rep.nonplanar[0].second);
    else if (!rep.collinear.empty())
        rep.message = "collinear edge triple at " + at_index(rep.collinear[0].first, rep.collinear[0].second);
    return rep;
}

template <Field S>
AsymptoticNet<S> apply_gauge(const AsymptoticNet<S>& n, const GaugeField<S>& x) {
    if (x.rows != n.rows || x.cols != n.cols) throw std::invalid_argument("apply_gauge: shape mismatch");
    AsymptoticNet<S> out = n;
    for (int i = 0; i < n.rows; ++i)
        for (int j = 0; j < n.cols; ++j) {
            if (x(i, j) == S(0)) throw std::invalid_argument("apply_gauge: zero gauge entry at " + at_index(i, j));
            out(i, j) = x(i, j) * n(i, j);
        }
    return out;
}

// Face field transformation p_g = x1 x2 / (x x12) p.
template <Field S>
Grid<S> gauge_face_field(const Grid<S>& p, const GaugeField<S>& x) {
    Grid<S> out = p;
    for (int i = 0; i < p.rows; ++i)
        for (int j = 0; j < p.cols; ++j) out(i, j) = x(i + 1, j) * x(i, j + 1) / (x(i, j) * x(i + 1, j + 1)) * p(i, j);
    return out;
}

// 1 - b1 d2 / (b2 d1): the quantity whose square root enters the gauge.
template <Field S>
S gauge_k(const LCoeffs<S>& l, const MCoeffs<S>& m) {
    return S(1) - l.b1 * m.d2 / (l.b2 * m.d1);
}

struct GaugeError : std::runtime_error {
    int i, j;
    GaugeError(const std::string& msg, int i_, int j_) : std::runtime_error(msg), i(i_), j(j_) {}
};

// Gauge with x = 1 on row n1 = 0 and column n2 = 0 in which
// (1 - p^2) b2 d1 / (b1 d2) = 1 wherever the frame is available. Outside the
// frame domain the gauge is unconstrained and set to 1. Positive roots only.
inline GaugeField<double> normalize_gauge(const AsymptoticNet<double>& n, const Grid<double>& p) {
    GaugeField<double> x(n.rows, n.cols, 1.0);
    for (int i = 0; i + 1 < n.rows; ++i)
        for (int j = 0; j + 1 < n.cols; ++j) {
            if (!has_frame(n, i, j)) continue;
            double k = gauge_k(frame_l(n, i, j), frame_m(n, i, j));
            if (!(k > 0))
                throw GaugeError("normalize_gauge: no real gauge, 1 - b1 d2/(b2 d1) = " + std::to_string(k) +
                                     " at " + at_index(i, j),
                                 i, j);
            x(i + 1, j + 1) = x(i + 1, j) * x(i, j + 1) * p(i, j) / (x(i, j) * std::sqrt(k));
        }
    return x;
}

}  // namespace latticelie
