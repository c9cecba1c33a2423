// The geometric Cauchy problem and generators of test nets.
//
// Strip data lives on rows n1 in {0,1} and columns n2 in {0,1}. Every other
// vertex (a, b) with a, b >= 2 lies on the line where the star planes at
// (a-1, b) and (a, b-1) meet; the closing condition of the tangency maps at
// patch (a-2, b-2) picks the point on that line.
#pragma once

#include "tangency.hpp"

#include <unsupported/Eigen/Polynomials>

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace latticelie {

struct EvolutionError : std::runtime_error {
    int a, b;
    EvolutionError(const std::string& msg, int a_, int b_) : std::runtime_error(msg), a(a_), b(b_) {}
};

struct CauchyData {
    int rows = 0, cols = 0;
    AsymptoticNet<double> points;  // only strip entries are meaningful
    Grid<char> known;
    double p0 = 1.0;
    int seed_i = 0, seed_j = 0;
};

inline bool on_strips(int i, int j) { return i <= 1 || j <= 1; }

struct VertexTrace {
    int a = 0, b = 0;
    ProjLine<double> line;
    double lambda = 0;   // parameter along A + lambda B (A, B unit points of the line)
    bool at_infinity = false;
    int degree = 0;      // measured degree of the closing polynomial
    int multiplicity = 1;
    int candidates = 0;
    double residual = 0;
};

struct EvolutionTrace {
    std::vector<VertexTrace> vertices;
};

struct EvolveOptions {
    double construct_tol = 1e-10;
    double accept_tol = 1e-8;      // candidate acceptance before polishing
    double health_min = 1e-7;
};

namespace detail {

inline double healthiest_frames_around(const AsymptoticNet<double>& n, const Grid<char>& known, int a, int b) {
    auto all_known = [&](int i0, int i1, int j0, int j1) {
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                if (!known.contains(i, j) || !known(i, j)) return false;
        return true;
    };
    double h = 1.0;
    for (auto [i, j] : {std::pair{a - 2, b - 1}, std::pair{a - 2, b}})
        if (has_l(n, i, j) && all_known(i, i + 2, j, j + 1)) h = std::min(h, l_health(frame_l(n, i, j, 1.0)));
    for (auto [i, j] : {std::pair{a - 1, b - 2}, std::pair{a, b - 2}})
        if (has_m(n, i, j) && all_known(i, i + 1, j, j + 2)) h = std::min(h, m_health(frame_m(n, i, j, 1.0)));
    return h;
}

// The six 2x2 minors of (X, Y), X = S2(i+1,j) S1(i,j), Y = S1(i,j+1) S2(i,j).
inline Vec<double, 6> closure_minors(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j) {
    auto l = frame_l(n, i, j, 1.0), l2 = frame_l(n, i, j + 1, 1.0);
    auto m = frame_m(n, i, j, 1.0), m1 = frame_m(n, i + 1, j, 1.0);
    auto x = flatten(compose(mobius_map(MapKind::S2, m1, p(i + 1, j)), mobius_map(MapKind::S1, l, p(i, j))));
    auto y = flatten(compose(mobius_map(MapKind::S1, l2, p(i, j + 1)), mobius_map(MapKind::S2, m, p(i, j))));
    Vec<double, 6> out;
    int k = 0;
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) out[k++] = x[u] * y[v] - x[v] * y[u];
    return out;
}

inline std::pair<HomPoint<double>, HomPoint<double>> star_line(const AsymptoticNet<double>& n, int a, int b,
                                                              ProjLine<double>* line_out = nullptr) {
    auto u = plane_through(n(a - 1, b), n(a - 2, b), n(a - 1, b - 1), 1e-10);
    auto v = plane_through(n(a, b - 1), n(a, b - 2), n(a - 1, b - 1), 1e-10);
    auto l = meet(u, v, 1e-10);
    if (line_out) *line_out = l;
    auto [x, y] = points_on_line(l);
    x = normalized(x);
    // Orthonormal pair spanning the same line.
    double d = 0;
    for (int k = 0; k < 4; ++k) d += x[k] * y[k];
    y = normalized(y - d * x);
    return {x, y};
}

// Coefficients (ascending) of the degree <= 4 interpolant of f on
// lambda = -2..2, its measured degree, and the check at two extra nodes.
template <class F>
std::vector<double> interpolate_quartic(F&& f, int* degree, double* check) {
    const double xs[5] = {-2, -1, 0, 1, 2};
    Eigen::Matrix<double, 5, 5> v;
    Eigen::Matrix<double, 5, 1> y;
    for (int k = 0; k < 5; ++k) {
        for (int e = 0; e < 5; ++e) v(k, e) = std::pow(xs[k], e);
        y(k) = f(xs[k]);
    }
    Eigen::Matrix<double, 5, 1> c = v.fullPivLu().solve(y);
    double scale = c.cwiseAbs().maxCoeff();
    int deg = 0;
    for (int e = 4; e >= 0; --e)
        if (std::abs(c(e)) > 1e-9 * scale) {
            deg = e;
            break;
        }
    *degree = scale == 0 ? -1 : deg;
    double worst = 0;
    for (double xe : {0.5, -1.5}) {
        double pv = 0;
        for (int e = 0; e < 5; ++e) pv += c(e) * std::pow(xe, e);
        worst = std::max(worst, std::abs(pv - f(xe)) / std::max(scale, 1e-300));
    }
    *check = worst;
    std::vector<double> out(c.data(), c.data() + 5);
    out.resize(std::max(deg, 0) + 1);
    return out;
}

inline std::vector<double> real_roots(const std::vector<double>& asc) {
    std::vector<double> out;
    if (asc.size() < 2) return out;
    if (asc.size() == 2) {
        out.push_back(-asc[0] / asc[1]);
        return out;
    }
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(asc.data(), asc.size());
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(c);
    for (auto& z : solver.roots())
        if (std::abs(z.imag()) < 1e-9 * std::max(1.0, std::abs(z))) out.push_back(z.real());
    return out;
}

}  // namespace detail

// Places vertex (a, b) from its neighbourhood and the quadric parameters of
// faces (a-2,b-2), (a-1,b-2), (a-2,b-1); returns the new point and
// p(a-1, b-1). The net is modified in place.
inline VertexTrace evolve_vertex(AsymptoticNet<double>& n, Grid<char>& known, QuadricField<double>& p, int a, int b,
                                 const EvolveOptions& opt = {}) {
    if (a < 2 || b < 2) throw std::invalid_argument("evolve_vertex: needs a, b >= 2");
    VertexTrace tr;
    tr.a = a;
    tr.b = b;
    const int i = a - 2, j = b - 2;
    HomPoint<double> A, B;
    try {
        std::tie(A, B) = detail::star_line(n, a, b, &tr.line);
    } catch (const DegeneracyError& e) {
        throw EvolutionError(std::string("degenerate star planes: ") + e.what(), a, b);
    }
    known(a, b) = 1;

    auto minors_at = [&](const HomPoint<double>& x) {
        n(a, b) = x;
        return detail::closure_minors(n, p, i, j);
    };
    auto closure_at = [&](const HomPoint<double>& x) {
        n(a, b) = normalized(x);
        return pm_residual_maps(n, p, i, j).value();
    };

    // Degree and polynomials of the six minors along A + lambda B.
    std::array<std::vector<double>, 6> polys;
    std::array<Vec<double, 6>, 7> samples;
    const double nodes[7] = {-2, -1, 0, 1, 2, 0.5, -1.5};
    try {
        for (int k = 0; k < 7; ++k) samples[k] = minors_at(A + nodes[k] * B);
    } catch (const std::exception& e) {
        known(a, b) = 0;
        throw EvolutionError(std::string("frame breakdown while sampling: ") + e.what(), a, b);
    }
    int best_minor = -1, best_degree = 0;
    double best_scale = 0, global = 0;
    for (auto& smp : samples)
        for (double v : smp) global = std::max(global, std::abs(v));
    for (int m = 0; m < 6; ++m) {
        double own = 0;
        for (auto& smp : samples) own = std::max(own, std::abs(smp[m]));
        if (own <= 1e-7 * global) continue;  // structurally zero minor
        auto f = [&](double x) {
            for (int k = 0; k < 7; ++k)
                if (nodes[k] == x) return samples[k][m];
            return 0.0;
        };
        int deg = 0;
        double check = 0;
        polys[m] = detail::interpolate_quartic(f, &deg, &check);
        if (check * own > 1e-8 * global) {
            known(a, b) = 0;
            throw EvolutionError("closing polynomial failed interpolation check", a, b);
        }
        double sc = 0;
        for (double c : polys[m]) sc = std::max(sc, std::abs(c));
        if (sc > best_scale) {
            best_scale = sc;
            best_minor = m;
            best_degree = deg;
        }
        tr.degree = std::max(tr.degree, deg);
    }
    if (best_minor < 0 || best_scale == 0) {
        known(a, b) = 0;
        throw EvolutionError("closing condition vanishes identically along the line", a, b);
    }

    // Candidates: real roots of the dominant minor plus the point at infinity
    // when its degree dropped below the generic one.
    std::vector<std::pair<double, bool>> cands;
    for (double x : detail::real_roots(polys[best_minor])) cands.push_back({x, false});
    if (best_degree < tr.degree || best_degree < 2) cands.push_back({0.0, true});
    tr.candidates = int(cands.size());

    struct Accepted {
        HomPoint<double> x;
        double lambda;
        bool inf;
        double res;
    };
    std::vector<Accepted> ok;
    for (auto [lam, inf] : cands) {
        HomPoint<double> x0 = inf ? B : A + lam * B;
        // Polish on the unit circle of the pencil: x = cos(th) A + sin(th) B.
        double th = inf ? M_PI / 2 : std::atan2(lam, 1.0);
        double res = INFINITY;
        try {
            auto f = [&](double t) {
                auto mv = minors_at(normalized(std::cos(t) * A + std::sin(t) * B));
                return mv;
            };
            for (int it = 0; it < 8; ++it) {
                auto f0 = f(th);
                const double h = 1e-7;
                auto fp = f(th + h), fm = f(th - h);
                double jj = 0, jf = 0, nf = 0;
                for (int k = 0; k < 6; ++k) {
                    double d = (fp[k] - fm[k]) / (2 * h);
                    jj += d * d;
                    jf += d * f0[k];
                    nf += f0[k] * f0[k];
                }
                if (jj == 0 || nf == 0) break;
                double step = -jf / jj;
                th += step;
                if (std::abs(step) < 1e-16) break;
            }
            x0 = std::cos(th) * A + std::sin(th) * B;
            res = closure_at(x0);
        } catch (const std::exception&) {
            continue;
        }
        if (!(res < opt.accept_tol)) continue;
        n(a, b) = normalized(x0);
        double h = 0;
        try {
            h = detail::healthiest_frames_around(n, known, a, b);
        } catch (const std::exception&) {
            continue;
        }
        if (h < opt.health_min) continue;
        bool dup = false;
        for (auto& o : ok) dup = dup || proj_equal(o.x, normalized(x0), 1e-7);
        if (!dup) ok.push_back({normalized(x0), std::tan(th), std::abs(std::cos(th)) < 1e-12, res});
    }
    if (ok.empty()) {
        known(a, b) = 0;
        n(a, b) = A;
        throw EvolutionError("no admissible real root of the closing condition", a, b);
    }
    if (ok.size() > 1) {
        known(a, b) = 0;
        throw EvolutionError("ambiguous: " + std::to_string(ok.size()) + " admissible roots", a, b);
    }
    n(a, b) = ok[0].x;
    tr.lambda = ok[0].lambda;
    tr.at_infinity = ok[0].inf;
    tr.residual = ok[0].res;
    // Multiplicity of the root in the dominant minor.
    {
        const auto& c = polys[best_minor];
        double d = 0, sc = 0;
        for (std::size_t e = 1; e < c.size(); ++e) {
            d += double(e) * c[e] * std::pow(tr.lambda, double(e - 1));
            sc += std::abs(double(e) * c[e] * std::pow(tr.lambda, double(e - 1)));
        }
        tr.multiplicity = (!tr.at_infinity && std::abs(d) <= 1e-8 * std::max(sc, 1e-300)) ? 2 : 1;
    }
    p(a - 1, b - 1) = c1_step(p(a - 1, b - 2), frame_m(n, a - 1, b - 2));
    return tr;
}

// p along the strips from the seed face.
inline QuadricField<double> strip_field(const AsymptoticNet<double>& n, int si, int sj, double p0) {
    const int fr = n.rows - 1, fc = n.cols - 1;
    QuadricField<double> p(fr, fc, 0.0);
    if (!(si == 0 || sj == 0)) throw std::invalid_argument("seed face must lie on the strips");
    p(si, sj) = p0;
    if (sj == 0) {
        for (int i = si + 1; i < fr; ++i) p(i, 0) = c1_step(p(i - 1, 0), frame_l(n, i - 1, 0));
        for (int i = si - 1; i >= 0; --i) p(i, 0) = c1_step(p(i + 1, 0), frame_l(n, i, 0));
        for (int j = 1; j < fc; ++j) p(0, j) = c1_step(p(0, j - 1), frame_m(n, 0, j - 1));
    } else {
        for (int j = sj + 1; j < fc; ++j) p(0, j) = c1_step(p(0, j - 1), frame_m(n, 0, j - 1));
        for (int j = sj - 1; j >= 0; --j) p(0, j) = c1_step(p(0, j + 1), frame_m(n, 0, j));
        for (int i = 1; i < fr; ++i) p(i, 0) = c1_step(p(i - 1, 0), frame_l(n, i - 1, 0));
    }
    return p;
}

struct CauchySolution {
    AsymptoticNet<double> net;
    QuadricField<double> p;
    EvolutionTrace trace;
};

inline CauchySolution solve_cauchy(const CauchyData& d, const EvolveOptions& opt = {}) {
    if (d.rows < 3 || d.cols < 3) throw std::invalid_argument("solve_cauchy: grid must be at least 3x3");
    CauchySolution out;
    out.net = d.points;
    Grid<char> known = d.known;
    for (int i = 0; i < d.rows; ++i)
        for (int j = 0; j < d.cols; ++j)
            if (on_strips(i, j) && !known(i, j)) throw std::invalid_argument("solve_cauchy: strip vertex missing");
    out.p = strip_field(out.net, d.seed_i, d.seed_j, d.p0);
    for (int a = 2; a < d.rows; ++a)
        for (int b = 2; b < d.cols; ++b) out.trace.vertices.push_back(evolve_vertex(out.net, known, out.p, a, b, opt));
    return out;
}

namespace detail {

inline HomPoint<double> gaussian_point(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return normalized(HomPoint<double>(g(rng), g(rng), g(rng), g(rng)));
}

inline double dot4(const HomPoint<double>& a, const HomPoint<double>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// A point of span{a, b, c} that keeps the new quad with a and b well
// conditioned: the part of c orthogonal to a and b, plus bounded noise along
// a and b. Plain Gaussian weights let strip quads collapse within a few steps.
inline HomPoint<double> in_plane(std::mt19937_64& rng, const HomPoint<double>& a, const HomPoint<double>& b,
                                 const HomPoint<double>& c) {
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    HomPoint<double> e1 = normalized(a);
    HomPoint<double> e2 = normalized(b - dot4(b, e1) * e1);
    HomPoint<double> e3 = c - dot4(c, e1) * e1;
    e3 = normalized(e3 - dot4(e3, e2) * e2);
    return normalized(e3 + u(rng) * e1 + u(rng) * e2);
}

inline HomPoint<Rational> in_plane(std::mt19937_64& rng, const HomPoint<Rational>& a, const HomPoint<Rational>& b,
                                   const HomPoint<Rational>& c) {
    std::uniform_int_distribution<int> g(-4, 4);
    auto nz = [&] {
        int v = 0;
        while (v == 0) v = g(rng);
        return Rational(v);
    };
    return normalized(nz() * a + nz() * b + nz() * c);
}

inline HomPoint<Rational> integer_point(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> g(-9, 9);
    HomPoint<Rational> x;
    do {
        x = HomPoint<Rational>(g(rng), g(rng), g(rng), g(rng));
    } while (x[0] == 0 && x[1] == 0 && x[2] == 0 && x[3] == 0);
    return normalized(x);
}

// Healthy frames on the strips wherever they are fully defined.
template <Field S>
bool strips_healthy(const AsymptoticNet<S>& n, double hmin) {
    try {
        for (int i = 0; i + 2 < n.rows; ++i) {
            if (l_health(frame_l(n, i, 0, 1.0)) < hmin) return false;
        }
        for (int j = 0; j + 2 < n.cols; ++j) {
            if (m_health(frame_m(n, 0, j, 1.0)) < hmin) return false;
        }
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

// Smallest |D| / scale over all faces carrying a frame.
inline double min_relative_discriminant(const AsymptoticNet<double>& n, const QuadricField<double>& p) {
    double out = INFINITY;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 1 < n.cols; ++j) {
            auto l = frame_l(n, i, j, 1.0);
            out = std::min(out, std::abs(discriminant1(l, p(i, j))) / discriminant1_scale(l, p(i, j)));
        }
    for (int i = 0; i + 1 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) {
            auto m = frame_m(n, i, j, 1.0);
            out = std::min(out, std::abs(discriminant2(m, p(i, j))) / discriminant2_scale(m, p(i, j)));
        }
    return out;
}

// PM transports T1 along n2 and T2 along n1 (up to positive factors), so a
// nearly vanishing D1 on column 0 or D2 on row 0 makes a whole strip nearly
// Godeaux-Rozet and its maps nearly constant. Generic data keeps them away
// from zero.
inline bool strip_discriminants_ok(const AsymptoticNet<double>& n, double p0, double rel) {
    try {
        double p = p0;
        for (int i = 0; i + 2 < n.rows; ++i) {
            auto l = frame_l(n, i, 0, 1.0);
            if (std::abs(discriminant1(l, p)) < rel * discriminant1_scale(l, p)) return false;
            p = c1_step(p, l);
        }
        p = p0;
        for (int j = 0; j + 2 < n.cols; ++j) {
            auto m = frame_m(n, 0, j, 1.0);
            if (std::abs(discriminant2(m, p)) < rel * discriminant2_scale(m, p)) return false;
            p = c1_step(p, m);
        }
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

template <Field S, class Point, class InPlane>
AsymptoticNet<S> random_strips(std::mt19937_64& rng, int R, int C, Point&& point, InPlane&& inplane) {
    AsymptoticNet<S> r(R, C, HomPoint<S>(S(0), S(0), S(0), S(0)));
    for (auto [i, j] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{0, 1}, std::pair{1, 1}}) r(i, j) = point(rng);
    // star (1,1) carries (2,1), (1,2); star (1,0) carries (2,0); star (0,1) carries (0,2)
    // in_plane(a, b, c): the new point completes a quad with a and b.
    r(2, 0) = inplane(rng, r(1, 0), r(1, 1), r(0, 0));
    r(0, 2) = inplane(rng, r(0, 1), r(1, 1), r(0, 0));
    r(2, 1) = inplane(rng, r(1, 1), r(1, 0), r(0, 1));
    r(1, 2) = inplane(rng, r(1, 1), r(0, 1), r(1, 0));
    for (int i = 2; i + 1 < R; ++i) {
        r(i + 1, 0) = inplane(rng, r(i, 0), r(i, 1), r(i - 1, 0));
        r(i + 1, 1) = inplane(rng, r(i, 1), r(i, 0), r(i - 1, 1));
    }
    for (int j = 2; j + 1 < C; ++j) {
        r(0, j + 1) = inplane(rng, r(0, j), r(1, j), r(0, j - 1));
        r(1, j + 1) = inplane(rng, r(1, j), r(0, j), r(1, j - 1));
    }
    return r;
}

}  // namespace detail

inline Grid<char> strip_mask(int R, int C) {
    Grid<char> k(R, C, 0);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) k(i, j) = on_strips(i, j);
    return k;
}

inline CauchyData random_cauchy_data(std::uint64_t seed, int rows, int cols) {
    if (rows < 3 || cols < 3) throw std::invalid_argument("random_cauchy_data: grid must be at least 3x3");
    std::mt19937_64 rng(seed);
    CauchyData d;
    d.rows = rows;
    d.cols = cols;
    d.known = strip_mask(rows, cols);
    for (;;) {
        d.points = detail::random_strips<double>(rng, rows, cols, detail::gaussian_point,
                                                 [](auto& g, auto& a, auto& b, auto& c) { return detail::in_plane(g, a, b, c); });
        std::uniform_real_distribution<double> u(0.5, 2.0);
        std::bernoulli_distribution sgn(0.5);
        d.p0 = (sgn(rng) ? -1.0 : 1.0) * u(rng);
        if (!detail::strips_healthy(d.points, 1e-3) || !detail::strip_discriminants_ok(d.points, d.p0, 1e-2)) continue;
        // Lookahead: data whose solution passes close to D = 0 on some face is
        // near-degenerate (nearly constant maps there amplify rounding far
        // beyond verification tolerances). Data the solver rejects is kept, so
        // breakdowns stay visible to the caller.
        try {
            auto sol = solve_cauchy(d);
            if (detail::min_relative_discriminant(sol.net, sol.p) < 1e-4) continue;
        } catch (const std::exception&) {
        }
        break;
    }
    return d;
}

// Generic nets: evolve with an arbitrary point on each star line.
inline AsymptoticNet<double> random_net(std::uint64_t seed, int rows, int cols) {
    if (rows < 3 || cols < 3) throw std::invalid_argument("random_net: grid must be at least 3x3");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (;;) {
        auto r = detail::random_strips<double>(rng, rows, cols, detail::gaussian_point,
                                               [](auto& gg, auto& a, auto& b, auto& c) { return detail::in_plane(gg, a, b, c); });
        if (!detail::strips_healthy(r, 1e-3)) continue;
        Grid<char> known = strip_mask(rows, cols);
        bool ok = true;
        for (int a = 2; a < rows && ok; ++a)
            for (int b = 2; b < cols && ok; ++b) {
                bool placed = false;
                for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
                    try {
                        auto [A, B] = detail::star_line(r, a, b);
                        r(a, b) = normalized(A + g(rng) * B);
                        known(a, b) = 1;
                        placed = detail::healthiest_frames_around(r, known, a, b) > 1e-3;
                    } catch (const std::exception&) {
                        placed = false;
                    }
                }
                ok = placed;
            }
        if (ok) return r;
    }
}

// Exact rational nets with integer strip data and integer pencil parameters.
inline AsymptoticNet<Rational> random_net_rational(std::uint64_t seed, int rows, int cols) {
    if (rows < 3 || cols < 3) throw std::invalid_argument("random_net_rational: grid must be at least 3x3");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> g(-3, 3);
    auto healthy = [](const AsymptoticNet<Rational>& r, int a, int b) {
        try {
            for (auto [i, j] : {std::pair{a - 2, b - 1}, std::pair{a - 2, b}})
                if (has_l(r, i, j) && i + 2 <= a && j + 1 <= b && l_health(frame_l(r, i, j, 1.0)) == 0) return false;
            for (auto [i, j] : {std::pair{a - 1, b - 2}, std::pair{a, b - 2}})
                if (has_m(r, i, j) && i + 1 <= a && j + 2 <= b && m_health(frame_m(r, i, j, 1.0)) == 0) return false;
        } catch (const std::exception&) {
            return false;
        }
        return true;
    };
    for (;;) {
        auto r = detail::random_strips<Rational>(rng, rows, cols, detail::integer_point,
                                                 [](auto& gg, auto& a, auto& b, auto& c) { return detail::in_plane(gg, a, b, c); });
        if (!detail::strips_healthy(r, 0.0)) continue;
        bool strip_ok = true;
        for (int i = 0; i + 2 < rows; ++i) strip_ok = strip_ok && l_health(frame_l(r, i, 0, 1.0)) > 0;
        for (int j = 0; j + 2 < cols; ++j) strip_ok = strip_ok && m_health(frame_m(r, 0, j, 1.0)) > 0;
        if (!strip_ok) continue;
        bool ok = true;
        for (int a = 2; a < rows && ok; ++a)
            for (int b = 2; b < cols && ok; ++b) {
                bool placed = false;
                for (int attempt = 0; attempt < 20 && !placed; ++attempt) {
                    try {
                        auto u = plane_through(r(a - 1, b), r(a - 2, b), r(a - 1, b - 1));
                        auto v = plane_through(r(a, b - 1), r(a, b - 2), r(a - 1, b - 1));
                        auto [A, B] = points_on_line(meet(u, v));
                        int lam = 0;
                        while (lam == 0) lam = g(rng);
                        r(a, b) = normalized(A + Rational(lam) * B);
                        placed = healthy(r, a, b);
                    } catch (const std::exception&) {
                        placed = false;
                    }
                }
                ok = placed;
            }
        if (ok) return r;
    }
}

// Delete vertex (a, b) and place it again from its neighbourhood.
inline double delete_and_restore(const AsymptoticNet<double>& n, const QuadricField<double>& p, int a, int b,
                                 const EvolveOptions& opt = {}) {
    AsymptoticNet<double> m = n;
    Grid<char> known(n.rows, n.cols, 1);
    QuadricField<double> q = p;
    known(a, b) = 0;
    m(a, b) = HomPoint<double>(0, 0, 0, 0);
    evolve_vertex(m, known, q, a, b, opt);
    return proportionality_residual(m(a, b).c, n(a, b).c);
}

struct UniquenessTrial {
    double p_hat = 0;
    double closure = 0;        // worst map closure of the alternative field
    double reproduction = 0;   // mismatch of the re-evolved vertex (2,2), or inf when evolution fails
    bool passes = false;
};

struct UniquenessVerdict {
    bool unique = true;
    std::vector<UniquenessTrial> trials;
    double tol = 0;
};

// Alternative fields from p_hat at face (0,0): each should violate closure
// somewhere, and re-evolving (2,2) from the strips should not give back the net.
inline UniquenessTrial probe_alternative(const AsymptoticNet<double>& n, double p_hat, double tol) {
    UniquenessTrial t;
    t.p_hat = p_hat;
    try {
        auto q = propagate_quadrics(n, 0, 0, p_hat, 1e-8);
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j) t.closure = std::max(t.closure, pm_residual_maps(n, q, i, j).value());
        AsymptoticNet<double> m = n;
        Grid<char> known(n.rows, n.cols, 1);
        known(2, 2) = 0;
        try {
            evolve_vertex(m, known, q, 2, 2);
            t.reproduction = proportionality_residual(m(2, 2).c, n(2, 2).c);
        } catch (const EvolutionError&) {
            t.reproduction = INFINITY;
        }
    } catch (const std::exception&) {
        t.closure = INFINITY;
        t.reproduction = INFINITY;
    }
    t.passes = t.closure < tol && t.reproduction < tol;
    return t;
}

inline UniquenessVerdict uniqueness_probe(const AsymptoticNet<double>& n, const QuadricField<double>& p, int trials,
                                          std::uint64_t seed = 1, double tol = 1e-8) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::bernoulli_distribution sgn(0.5);
    UniquenessVerdict v;
    v.tol = tol;
    const double p0 = p(0, 0);
    for (int k = 0; k < trials; ++k) {
        double ph = p0;
        while (std::abs(ph - p0) <= 1e-6 * std::abs(p0)) ph = (sgn(rng) ? -1.0 : 1.0) * std::abs(p0) * std::exp(g(rng));
        auto t = probe_alternative(n, ph, tol);
        v.unique = v.unique && !t.passes;
        v.trials.push_back(t);
    }
    return v;
}

}  // namespace latticelie
