// Helpers shared by the unit tests and the acceptance runner.
#pragma once

#include <latticelie/classify.hpp>
#include <latticelie/special.hpp>

#include <Eigen/Dense>

#include <random>

namespace latticelie::fixtures {

inline double max_gmc(const AsymptoticNet<double>& n) {
    double w = 0;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) w = std::max(w, gmc_residual_normalized(n, i, j));
    return w;
}

inline double max_pm_maps(const AsymptoticNet<double>& n, const QuadricField<double>& p) {
    double w = 0;
    for (int i = 0; i + 2 < n.rows; ++i)
        for (int j = 0; j + 2 < n.cols; ++j) w = std::max(w, pm_residual_maps(n, p, i, j).value());
    return w;
}

// Label t' with Q'(s', t') proportional to x, for a point x on the s'-generator of q.
inline double t_label_of(const LatticeQuadric<double>& q, double s, const HomPoint<double>& x) {
    HomPoint<double> a = q.p * q.r12 + s * q.r1, b = q.r2 + s * q.r;
    Eigen::Matrix<double, 4, 2> m;
    Eigen::Vector4d y;
    for (int k = 0; k < 4; ++k) {
        m(k, 0) = a[k];
        m(k, 1) = b[k];
        y(k) = x[k];
    }
    Eigen::Vector2d c = m.colPivHouseholderQr().solve(y);
    return c(1) / c(0);
}

// Random positive gauge with log-normal entries.
inline GaugeField<double> random_gauge(std::uint64_t seed, int rows, int cols) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.5);
    std::bernoulli_distribution sgn(0.3);
    GaugeField<double> x(rows, cols);
    for (auto& v : x.v) v = (sgn(rng) ? -1.0 : 1.0) * std::exp(g(rng));
    return x;
}

inline std::vector<bool> class_booleans(const SurfaceClassReport& r) {
    return {r.pm,         r.godeauxRozet,   r.demoulin,         r.semiQ[0],      r.semiQ[1],
            r.complexSurf[0], r.complexSurf[1], r.doublyQ,      r.doublyComplex, r.qSurface,
            r.d1_all_zero,    r.d2_all_zero,    r.tzitzeica.value_or(false), r.tzitzeica.has_value()};
}

}  // namespace latticelie::fixtures
