// Scalar backends: IEEE double (default) and exact rationals.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace latticelie {

using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <class S>
concept Field = std::is_same_v<S, double> || std::is_same_v<S, Rational>;

template <Field S>
S sabs(const S& x) {
    if constexpr (is_exact_v<S>) return x < 0 ? S(-x) : x;
    else return std::abs(x);
}

template <Field S>
double to_double(const S& x) {
    if constexpr (is_exact_v<S>) return x.template convert_to<double>();
    else return x;
}

// Relative zero test. |x| <= tol * scale in float mode, x == 0 in exact mode.
template <Field S>
bool negligible(const S& x, double scale, double tol) {
    if constexpr (is_exact_v<S>) return x == 0;
    else return std::abs(x) <= tol * scale;
}

// Exact zero in rational mode, a tolerance-scaled ratio otherwise.
// ratio() is what callers report; the exact branch keeps the reported value honest.
template <Field S>
double ratio(const S& num, double den) {
    if (den == 0.0) return to_double(num) == 0.0 ? 0.0 : INFINITY;
    if constexpr (is_exact_v<S>) {
        if (num == 0) return 0.0;
    }
    return std::abs(to_double(num)) / den;
}

struct DegeneracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotAsymptoticError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string at_index(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace latticelie
