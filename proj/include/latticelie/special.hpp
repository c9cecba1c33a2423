// Test-data factories for the special classes: Godeaux-Rozet, Demoulin,
// Tzitzeica and doubly Q patches. Each returns a feasibility report instead
// of a net that only approximately belongs to the class.
#pragma once

#include "cauchy.hpp"
#include "classify.hpp"

#include <Eigen/Dense>

#include <optional>
#include <random>
#include <string>

namespace latticelie {

enum class SpecialTarget { GodeauxRozet, Demoulin, Tzitzeica, DoublyQ };

inline const char* target_name(SpecialTarget t) {
    switch (t) {
        case SpecialTarget::GodeauxRozet: return "godeaux-rozet";
        case SpecialTarget::Demoulin: return "demoulin";
        case SpecialTarget::Tzitzeica: return "tzitzeica";
        case SpecialTarget::DoublyQ: return "doubly-q";
    }
    return "?";
}

inline std::optional<SpecialTarget> parse_target(const std::string& s) {
    for (auto t : {SpecialTarget::GodeauxRozet, SpecialTarget::Demoulin, SpecialTarget::Tzitzeica, SpecialTarget::DoublyQ})
        if (s == target_name(t)) return t;
    return std::nullopt;
}

struct SpecialSurface {
    SpecialTarget target = SpecialTarget::GodeauxRozet;
    bool feasible = false;
    std::string reason;
    AsymptoticNet<double> net;
    QuadricField<double> p;
    double residual = INFINITY;  // class-defining residual, scale normalized
    double health = 0;           // smallest frame health
    int attempts = 0;
    // The Tzitzeica patch comes with the envelope whose congruence is
    // concurrent; seed labels at face (0, 0).
    std::optional<GenParam<double>> seed;
};

namespace detail {

inline double min_health(const AsymptoticNet<double>& n) {
    double h = INFINITY;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 1 < n.cols; ++j) h = std::min(h, l_health(frame_l(n, i, j, 1.0)));
    for (int i = 0; i + 1 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) h = std::min(h, m_health(frame_m(n, i, j, 1.0)));
    return h;
}

inline double max_discriminant(const AsymptoticNet<double>& n, const QuadricField<double>& p, int direction) {
    double w = 0;
    if (direction == 1) {
        for (int i = 0; i + 2 < n.rows; ++i)
            for (int j = 0; j + 1 < n.cols; ++j) {
                auto l = frame_l(n, i, j);
                w = std::max(w, std::abs(discriminant1(l, p(i, j))) / discriminant1_scale(l, p(i, j)));
            }
    } else {
        for (int i = 0; i + 1 < n.rows; ++i)
            for (int j = 0; j + 2 < n.cols; ++j) {
                auto m = frame_m(n, i, j);
                w = std::max(w, std::abs(discriminant2(m, p(i, j))) / discriminant2_scale(m, p(i, j)));
            }
    }
    return w;
}

inline double projective_distance(const HomPoint<double>& a, const HomPoint<double>& b) {
    auto x = normalized(a), y = normalized(b);
    double dp = 0, dm = 0;
    for (int k = 0; k < 4; ++k) {
        dp += (x[k] - y[k]) * (x[k] - y[k]);
        dm += (x[k] + y[k]) * (x[k] + y[k]);
    }
    return std::sqrt(std::min(dp, dm));
}

// Places n(a, b) on the line A + lambda B at the root of the quadratic f
// nearest to pred. f is quadratic in lambda because the frame coordinates of
// the new point are linear in it. A root at `avoid` collapses the frame and
// is never taken.
template <class F>
bool place_root(AsymptoticNet<double>& n, int a, int b, const HomPoint<double>& A, const HomPoint<double>& B, F&& f,
                const HomPoint<double>& pred, const HomPoint<double>* avoid = nullptr) {
    auto at = [&](double lam) {
        n(a, b) = A + lam * B;
        return f();
    };
    double v0 = at(0.0), v1 = at(1.0), vm = at(-1.0);
    double c0 = v0, c2 = 0.5 * (v1 + vm) - v0, c1 = 0.5 * (v1 - vm);
    double scale = std::max({std::abs(c0), std::abs(c1), std::abs(c2)});
    if (scale == 0 || std::abs(c2) < 1e-10 * scale) return false;
    double disc = c1 * c1 - 4 * c2 * c0;
    if (disc < 1e-12 * scale * scale) return false;  // complex or nearly double
    double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    double roots[2] = {q / c2, c0 / q};
    double best = INFINITY;
    HomPoint<double> pick;
    for (double lam : roots) {
        if (!std::isfinite(lam)) continue;
        auto x = normalized(A + lam * B);
        if (avoid && projective_distance(x, *avoid) < 1e-6) continue;
        double d = projective_distance(x, pred);
        if (d < best) {
            best = d;
            pick = x;
        }
    }
    if (!std::isfinite(best)) return false;
    n(a, b) = pick;
    return true;
}

inline std::pair<HomPoint<double>, HomPoint<double>> plane_line(std::mt19937_64& rng, const HomPoint<double>& a,
                                                                const HomPoint<double>& b, const HomPoint<double>& c) {
    return {in_plane(rng, a, b, c), in_plane(rng, a, b, c)};
}

inline double d1_at(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j) {
    auto l = frame_l(n, i, j, 1.0);
    return discriminant1(l, p(i, j)) / discriminant1_scale(l, p(i, j));
}

inline double d2_at(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j) {
    auto m = frame_m(n, i, j, 1.0);
    return discriminant2(m, p(i, j)) / discriminant2_scale(m, p(i, j));
}

// Unnormalized, hence exactly quadratic in the position of the new vertex.
inline double d1_raw(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j) {
    return discriminant1(frame_l(n, i, j, 1.0), p(i, j));
}
inline double d2_raw(const AsymptoticNet<double>& n, const QuadricField<double>& p, int i, int j) {
    return discriminant2(frame_m(n, i, j, 1.0), p(i, j));
}

// Vertex by vertex: every new vertex on its admissible line is a root of
// D1 = 0 for the face it completes; for Demoulin the second row is placed on
// D2 = 0 as well, after which D2 vanishes by itself.
inline std::optional<std::pair<AsymptoticNet<double>, QuadricField<double>>> try_godeaux_rozet(std::mt19937_64& rng,
                                                                                               int R, int C,
                                                                                               bool demoulin) {
    AsymptoticNet<double> n(R, C);
    QuadricField<double> p(R - 1, C - 1, 0.0);
    std::uniform_real_distribution<double> up(0.5, 1.5);
    for (auto [i, j] : {std::pair{0, 0}, {1, 0}, {0, 1}, {1, 1}}) n(i, j) = gaussian_point(rng);
    p(0, 0) = up(rng) * (rng() % 2 ? 1 : -1);
    try {
        n(2, 0) = in_plane(rng, n(1, 0), n(0, 0), n(1, 1));
        n(0, 2) = in_plane(rng, n(0, 1), n(0, 0), n(1, 1));
        auto [A, B] = plane_line(rng, n(1, 1), n(0, 1), n(1, 0));
        if (!place_root(n, 2, 1, A, B, [&] { return d1_raw(n, p, 0, 0); }, n(2, 0))) return std::nullopt;
        auto [A2, B2] = plane_line(rng, n(1, 1), n(0, 1), n(1, 0));
        if (demoulin) {
            if (!place_root(n, 1, 2, A2, B2, [&] { return d2_raw(n, p, 0, 0); }, n(0, 2))) return std::nullopt;
        } else {
            n(1, 2) = A2;
        }
        p(1, 0) = c1_step(p(0, 0), frame_l(n, 0, 0, 1.0));
        p(0, 1) = c1_step(p(0, 0), frame_m(n, 0, 0, 1.0));
        for (int i = 1; i + 2 < R; ++i) {
            n(i + 2, 0) = in_plane(rng, n(i + 1, 0), n(i, 0), n(i + 1, 1));
            auto [a, b] = plane_line(rng, n(i + 1, 1), n(i, 1), n(i + 1, 0));
            if (!place_root(n, i + 2, 1, a, b, [&] { return d1_raw(n, p, i, 0); }, n(i + 2, 0))) return std::nullopt;
            p(i + 1, 0) = c1_step(p(i, 0), frame_l(n, i, 0, 1.0));
        }
        for (int j = 1; j + 2 < C; ++j) {
            n(0, j + 2) = in_plane(rng, n(0, j + 1), n(0, j), n(1, j + 1));
            auto [a, b] = plane_line(rng, n(1, j + 1), n(1, j), n(0, j + 1));
            if (demoulin) {
                if (!place_root(n, 1, j + 2, a, b, [&] { return d2_raw(n, p, 0, j); }, n(0, j + 2))) return std::nullopt;
            } else {
                n(1, j + 2) = a;
            }
            p(0, j + 1) = c1_step(p(0, j), frame_m(n, 0, j, 1.0));
        }
        for (int a = 2; a < R; ++a)
            for (int b = 2; b < C; ++b) {
                auto [A3, B3] = star_line(n, a, b);
                auto pred = n(a - 1, b) + n(a, b - 1) - n(a - 1, b - 1);
                if (!place_root(n, a, b, A3, B3, [&] { return d1_raw(n, p, a - 2, b - 1); }, pred, &n(a - 1, b - 1)))
                    return std::nullopt;
                p(a - 1, b - 1) = c1_step(p(a - 1, b - 2), frame_m(n, a - 1, b - 2, 1.0));
            }
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::pair{n, p};
}

// Discrete affine sphere centred at the origin: x12 + x = h (x1 + x2) with
// every star planar. Lifted to (x, 1) with p = 1 / h, the labels s = t = -1
// give an envelope whose congruence passes through (0, 0, 0, 1).
inline std::optional<std::pair<AsymptoticNet<double>, QuadricField<double>>> try_affine_sphere(std::mt19937_64& rng,
                                                                                               int R, int C) {
    using V3 = Eigen::Vector3d;
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> uh(0.6, 0.9);
    Grid<V3> x(R, C, V3::Zero());
    Grid<double> H(R - 1, C - 1, 0.0);
    auto gv = [&] { return V3(g(rng), g(rng), g(rng)); };
    auto inpl = [&](const V3& a, const V3& b, const V3& c) { return V3(a + g(rng) * (b - a) + g(rng) * (c - a)); };
    // h with h (rr1 + rr2) - r in the plane through P0, P1, P2.
    auto h_solve = [](const V3& r, const V3& rr1, const V3& rr2, const V3& P0, const V3& P1, const V3& P2) {
        V3 nn = (P1 - P0).cross(P2 - P0);
        return nn.dot(r + P0) / nn.dot(rr1 + rr2);
    };
    x(0, 0) = gv();
    x(1, 0) = gv();
    x(0, 1) = gv();
    H(0, 0) = uh(rng);
    x(1, 1) = H(0, 0) * (x(1, 0) + x(0, 1)) - x(0, 0);
    if (R > 2) {
        x(2, 0) = inpl(x(1, 0), x(0, 0), x(1, 1));
        H(1, 0) = h_solve(x(1, 0), x(2, 0), x(1, 1), x(1, 1), x(0, 1), x(1, 0));
        x(2, 1) = H(1, 0) * (x(2, 0) + x(1, 1)) - x(1, 0);
    }
    if (C > 2) {
        x(0, 2) = inpl(x(0, 1), x(0, 0), x(1, 1));
        H(0, 1) = h_solve(x(0, 1), x(1, 1), x(0, 2), x(1, 1), x(0, 1), x(1, 0));
        x(1, 2) = H(0, 1) * (x(1, 1) + x(0, 2)) - x(0, 1);
    }
    for (int i = 2; i + 1 < R; ++i) {
        x(i + 1, 0) = inpl(x(i, 0), x(i - 1, 0), x(i, 1));
        H(i, 0) = h_solve(x(i, 0), x(i + 1, 0), x(i, 1), x(i, 1), x(i - 1, 1), x(i, 0));
        x(i + 1, 1) = H(i, 0) * (x(i + 1, 0) + x(i, 1)) - x(i, 0);
    }
    for (int j = 2; j + 1 < C; ++j) {
        x(0, j + 1) = inpl(x(0, j), x(0, j - 1), x(1, j));
        H(0, j) = h_solve(x(0, j), x(1, j), x(0, j + 1), x(1, j), x(1, j - 1), x(0, j));
        x(1, j + 1) = H(0, j) * (x(1, j) + x(0, j + 1)) - x(0, j);
    }
    for (int a = 2; a < R; ++a)
        for (int b = 2; b < C; ++b) {
            double h = h_solve(x(a - 1, b - 1), x(a, b - 1), x(a - 1, b), x(a - 1, b), x(a - 2, b), x(a - 1, b - 1));
            H(a - 1, b - 1) = h;
            x(a, b) = h * (x(a, b - 1) + x(a - 1, b)) - x(a - 1, b - 1);
        }
    AsymptoticNet<double> n(R, C);
    QuadricField<double> p(R - 1, C - 1, 0.0);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) {
            if (!x(i, j).allFinite()) return std::nullopt;
            n(i, j) = HomPoint<double>(x(i, j)(0), x(i, j)(1), x(i, j)(2), 1.0);
        }
    for (int i = 0; i + 1 < R; ++i)
        for (int j = 0; j + 1 < C; ++j) {
            if (!std::isfinite(H(i, j)) || std::abs(H(i, j)) < 1e-3 || std::abs(std::abs(H(i, j)) - 1) < 1e-2)
                return std::nullopt;
            p(i, j) = 1.0 / H(i, j);
        }
    return std::pair{n, p};
}

using M2 = Eigen::Matrix2d;

inline HomPoint<double> matrix_point(const M2& m) { return normalized(HomPoint<double>(m(0, 0), m(1, 0), m(0, 1), m(1, 1))); }

// The rank one matrices a b^T with a fixed (or b fixed) form the two rulings
// of det = 0.
inline ProjLine<double> left_ruling(const Eigen::Vector2d& a) {
    return line_through(matrix_point(a * Eigen::RowVector2d(1, 0)), matrix_point(a * Eigen::RowVector2d(0, 1)));
}
inline ProjLine<double> right_ruling(const Eigen::Vector2d& b) {
    return line_through(matrix_point(Eigen::Vector2d(1, 0) * b.transpose()),
                        matrix_point(Eigen::Vector2d(0, 1) * b.transpose()));
}

// p of the lattice quadric of face (i, j) that contains the s-line l.
inline double p_containing(const AsymptoticNet<double>& n, int i, int j, const ProjLine<double>& l) {
    const auto &r = n(i, j), &r1 = n(i + 1, j), &r2 = n(i, j + 1), &r12 = n(i + 1, j + 1);
    auto coeffs = [](const HomPoint<double>& u, const HomPoint<double>& v, const HomPoint<double>& x) {
        Eigen::Matrix<double, 4, 2> m;
        for (int k = 0; k < 4; ++k) m.row(k) << u[k], v[k];
        Eigen::Vector4d xv(x[0], x[1], x[2], x[3]);
        Eigen::Vector2d c = m.colPivHouseholderQr().solve(xv);
        return c;
    };
    auto X = intersect_lines(l, line_through(r2, r));
    auto Y = intersect_lines(l, line_through(r12, r1));
    Eigen::Vector2d cx = coeffs(r2, r, X), cy = coeffs(r12, r1, Y);
    double sigma = cx(1) / cx(0);
    return sigma / (cy(1) / cy(0));
}

// Translation net in the 2x2 matrix model of P^3, where the circumscribed
// quadric is det = 0:
//   M(i, j) = g E_0 ... E_{j-1} F_{i-1} ... F_0 h,  E = I + b eta, F = I + d kappa,
// with all eta, kappa symmetric and traceless. Steps along n2 fix the two
// left rulings through the eigenvectors of eta, steps along n1 the two right
// rulings; the stars are planar because eta and kappa share a plane of sl2.
struct DoublyQLines {
    std::vector<std::array<ProjLine<double>, 2>> n1, n2;  // per n1 strip (column), per n2 strip (row)
};

inline std::optional<std::tuple<AsymptoticNet<double>, QuadricField<double>, DoublyQLines>> try_doubly_q(
    std::mt19937_64& rng, int R, int C) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> th(0.0, M_PI), bm(0.3, 0.8);
    M2 s1, s3;
    s1 << 0, 1, 1, 0;
    s3 << 1, 0, 0, -1;
    auto element = [&] {
        double t = th(rng);
        return M2(std::cos(t) * s1 + std::sin(t) * s3);
    };
    auto step = [&] { return bm(rng) * (rng() % 2 ? 1.0 : -1.0); };
    std::vector<M2> eta(C - 1), kap(R - 1), E(C - 1), F(R - 1);
    for (int k = 0; k + 1 < C; ++k) {
        eta[k] = element();
        E[k] = M2::Identity() + step() * eta[k];
    }
    for (int k = 0; k + 1 < R; ++k) {
        kap[k] = element();
        F[k] = M2::Identity() + step() * kap[k];
    }
    M2 gl, hr;
    gl << g(rng), g(rng), g(rng), g(rng);
    hr << g(rng), g(rng), g(rng), g(rng);
    if (std::abs(gl.determinant()) < 0.1 || std::abs(hr.determinant()) < 0.1) return std::nullopt;
    std::vector<M2> L(C, M2::Identity()), Rf(R, M2::Identity());
    for (int j = 1; j < C; ++j) L[j] = L[j - 1] * E[j - 1];
    for (int i = 1; i < R; ++i) Rf[i] = F[i - 1] * Rf[i - 1];
    AsymptoticNet<double> n(R, C);
    for (int i = 0; i < R; ++i)
        for (int j = 0; j < C; ++j) n(i, j) = matrix_point(gl * L[j] * Rf[i] * hr);
    DoublyQLines lines;
    for (int j = 0; j + 1 < C; ++j) {
        Eigen::SelfAdjointEigenSolver<M2> es(eta[j]);
        lines.n1.push_back({left_ruling(gl * L[j] * es.eigenvectors().col(0)),
                            left_ruling(gl * L[j] * es.eigenvectors().col(1))});
    }
    for (int i = 0; i + 1 < R; ++i) {
        Eigen::SelfAdjointEigenSolver<M2> es(kap[i]);
        lines.n2.push_back({right_ruling(hr.transpose() * Rf[i].transpose() * es.eigenvectors().col(0)),
                            right_ruling(hr.transpose() * Rf[i].transpose() * es.eigenvectors().col(1))});
    }
    try {
        double p0 = p_containing(n, 0, 0, lines.n1[0][0]);
        auto p = propagate_quadrics(n, 0, 0, p0, 1e-9);
        return std::tuple{n, p, lines};
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Worst implicit residual of sample points of the strip lines on the face
// quadrics that should contain them.
inline double lines_on_quadrics(const AsymptoticNet<double>& n, const QuadricField<double>& p, const DoublyQLines& dl) {
    double w = 0;
    for (int i = 0; i + 1 < n.rows; ++i)
        for (int j = 0; j + 1 < n.cols; ++j) {
            auto a = implicit_quadric(make_quadric(n, p, i, j), 1.0);
            for (const auto* pair : {&dl.n1[j], &dl.n2[i]})
                for (const auto& l : *pair) {
                    auto [u, v] = points_on_line(l);
                    for (double t : {-1.3, 0.0, 0.7, 2.1}) w = std::max(w, implicit_residual(a, normalized(u + t * v)));
                }
        }
    return w;
}

}  // namespace detail

inline SpecialSurface construct_special(SpecialTarget target, std::uint64_t seed, int rows, int cols,
                                        int max_attempts = 200, double min_health = 1e-2) {
    if (rows < 3 || cols < 3) throw std::invalid_argument("construct_special: needs at least a 3x3 net");
    SpecialSurface out;
    out.target = target;
    std::mt19937_64 rng(seed);
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
        out.attempts = attempt;
        AsymptoticNet<double> n;
        QuadricField<double> p;
        double residual = INFINITY;
        std::optional<GenParam<double>> env_seed;
        try {
            if (target == SpecialTarget::GodeauxRozet || target == SpecialTarget::Demoulin) {
                auto r = detail::try_godeaux_rozet(rng, rows, cols, target == SpecialTarget::Demoulin);
                if (!r) continue;
                n = r->first;
                // The field the net itself determines from the seed face.
                p = propagate_quadrics(n, 0, 0, r->second(0, 0), 1e-9);
                residual = detail::max_discriminant(n, p, 1);
                if (target == SpecialTarget::Demoulin) residual = std::max(residual, detail::max_discriminant(n, p, 2));
            } else if (target == SpecialTarget::Tzitzeica) {
                auto r = detail::try_affine_sphere(rng, rows, cols);
                if (!r) continue;
                auto pq = propagate_quadrics(r->first, 0, 0, r->second(0, 0), 1e-9);
                double mis = 0;
                for (std::size_t k = 0; k < pq.v.size(); ++k)
                    mis = std::max(mis, std::abs(pq.v[k] - r->second.v[k]) / std::abs(r->second.v[k]));
                if (mis > 1e-9) continue;
                // Generic position: a random projective map and a random gauge.
                std::normal_distribution<double> g(0.0, 1.0);
                std::uniform_real_distribution<double> ug(0.5, 2.0);
                Mat<double, 4> T;
                for (auto& row : T)
                    for (auto& e : row) e = g(rng);
                for (int k = 0; k < 4; ++k) T[k][k] += 2.5;
                GaugeField<double> x(rows, cols, 1.0);
                for (auto& e : x.v) e = ug(rng) * (rng() % 2 ? 1 : -1);
                n = AsymptoticNet<double>(rows, cols);
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < cols; ++j) {
                        HomPoint<double> y;
                        for (int u = 0; u < 4; ++u) {
                            double acc = 0;
                            for (int v = 0; v < 4; ++v) acc += T[u][v] * r->first(i, j)[v];
                            y[u] = acc;
                        }
                        n(i, j) = x(i, j) * y;
                    }
                p = gauge_face_field(r->second, x);
                env_seed = GenParam<double>::affine(-x(0, 1) / x(0, 0), -x(1, 0) / x(0, 0));
                auto env = propagate_envelope(n, p, 0, 0, *env_seed);
                auto tz = tzitzeica_test(n, p, env);
                residual = std::max({tz.max_residual, tz.max_incidence, detail::max_discriminant(n, p, 1),
                                     detail::max_discriminant(n, p, 2)});
            } else {
                auto r = detail::try_doubly_q(rng, rows, cols);
                if (!r) continue;
                n = std::get<0>(*r);
                p = std::get<1>(*r);
                residual = detail::lines_on_quadrics(n, p, std::get<2>(*r));
                // Well separated shared generators keep the strip-wide
                // coincidence test meaningful.
                double dmin = INFINITY;
                for (int i = 0; i + 2 < rows; ++i)
                    for (int j = 0; j + 1 < cols; ++j) dmin = std::min(dmin, std::abs(detail::d1_at(n, p, i, j)));
                for (int i = 0; i + 1 < rows; ++i)
                    for (int j = 0; j + 2 < cols; ++j) dmin = std::min(dmin, std::abs(detail::d2_at(n, p, i, j)));
                if (dmin < 1e-2) continue;
            }
        } catch (const std::exception&) {
            continue;
        }
        double h = detail::min_health(n);
        if (!(h >= min_health) || !(residual < 1e-8)) continue;
        out.feasible = true;
        out.net = n;
        out.p = p;
        out.residual = residual;
        out.health = h;
        out.seed = env_seed;
        out.reason.clear();
        return out;
    }
    out.reason = std::string("no ") + target_name(target) + " patch of " + std::to_string(rows) + "x" +
                 std::to_string(cols) + " within " + std::to_string(max_attempts) + " attempts";
    return out;
}

}  // namespace latticelie
