// Small dense helpers that work for both scalar backends.
#pragma once

#include "scalar.hpp"

#include <array>
#include <optional>
#include <utility>

namespace latticelie {

template <class S, std::size_t N>
using Mat = std::array<std::array<S, N>, N>;

template <class S, std::size_t N>
using Vec = std::array<S, N>;

template <Field S, std::size_t N>
Mat<S, N> mat_mul(const Mat<S, N>& a, const Mat<S, N>& b) {
    Mat<S, N> c{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            S acc(0);
            for (std::size_t k = 0; k < N; ++k) acc += a[i][k] * b[k][j];
            c[i][j] = acc;
        }
    return c;
}

template <Field S, std::size_t N>
double max_abs(const Mat<S, N>& a) {
    double m = 0;
    for (auto& row : a)
        for (auto& v : row) m = std::max(m, std::abs(to_double(v)));
    return m;
}

template <Field S, std::size_t N>
double max_abs(const Vec<S, N>& a) {
    double m = 0;
    for (auto& v : a) m = std::max(m, std::abs(to_double(v)));
    return m;
}

template <Field S, std::size_t N>
double norm2(const Vec<S, N>& a) {
    double m = 0;
    for (auto& v : a) {
        double d = to_double(v);
        m += d * d;
    }
    return std::sqrt(m);
}

// Determinant by Gaussian elimination (partial pivoting in float mode).
template <Field S, std::size_t N>
S det(Mat<S, N> a) {
    S d(1);
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c; r < N; ++r) {
            if constexpr (is_exact_v<S>) {
                if (a[r][c] != 0) { piv = r; break; }
            } else if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (a[piv][c] == S(0)) return S(0);
        if (piv != c) {
            std::swap(a[piv], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (std::size_t r = c + 1; r < N; ++r) {
            if (a[r][c] == S(0)) continue;
            S f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return d;
}

// Solves a x = b; nullopt on an exactly singular pivot.
template <Field S, std::size_t N>
std::optional<Vec<S, N>> solve(Mat<S, N> a, Vec<S, N> b) {
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c; r < N; ++r) {
            if constexpr (is_exact_v<S>) {
                if (a[r][c] != 0) { piv = r; break; }
            } else if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (a[piv][c] == S(0)) return std::nullopt;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = c + 1; r < N; ++r) {
            if (a[r][c] == S(0)) continue;
            S f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < N; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    Vec<S, N> x{};
    for (std::size_t ii = N; ii-- > 0;) {
        S acc = b[ii];
        for (std::size_t k = ii + 1; k < N; ++k) acc -= a[ii][k] * x[k];
        x[ii] = acc / a[ii][ii];
    }
    return x;
}

}  // namespace latticelie
