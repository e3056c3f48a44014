// Independent reference implementations used by the tests. They share no code
// with the library and favour simplicity over speed.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

/// J_n(x) = (1/2pi) int_0^{2pi} cos(n t - x sin t) dt. The trapezoid rule on a
/// full period converges geometrically once the node count exceeds |n| + |x|.
inline double bessel_j(int n, double x, int nodes = 512) {
    long double s = 0.0L;
    const long double h = 2.0L * std::numbers::pi_v<long double> / nodes;
    for (int k = 0; k < nodes; ++k) {
        const long double t = h * k;
        s += std::cos(static_cast<long double>(n) * t - static_cast<long double>(x) * std::sin(t));
    }
    return static_cast<double>(s / nodes);
}

/// L^k_j(x) = sum_i (-1)^i C(j+k, j-i) x^i / i!, with each term obtained
/// from the previous one by its exact rational ratio. Quad precision absorbs
/// the cancellation between terms.
inline double laguerre(int k, int j, double x) {
    using quad = __float128;
    quad term = 1; // C(j+k, j)
    for (int i = 1; i <= j; ++i) {
        term = term * static_cast<quad>(k + i) / static_cast<quad>(i);
    }
    quad s = term;
    for (int i = 0; i < j; ++i) {
        term *= -static_cast<quad>(j - i) * static_cast<quad>(x) /
                (static_cast<quad>(k + i + 1) * static_cast<quad>(i + 1));
        s += term;
    }
    return static_cast<double>(s);
}

/// Composite Simpson rule with n (even) intervals.
template <class F>
auto simpson(F&& f, double a, double b, int n) -> decltype(f(a)) {
    if (n % 2 != 0) {
        ++n;
    }
    const double h = (b - a) / n;
    auto s = f(a) + f(b);
    for (int i = 1; i < n; ++i) {
        s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * (h / 3.0);
}

/// Trapezoid rule on a uniform grid of n intervals.
template <class F>
auto trapezoid(F&& f, double a, double b, long n) -> decltype(f(a)) {
    const double h = (b - a) / static_cast<double>(n);
    auto s = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) {
        s += f(a + static_cast<double>(i) * h);
    }
    return s * h;
}

/// Relative difference with an absolute floor.
inline double rel_diff(double a, double b, double floor = 1e-300) {
    return std::abs(a - b) / std::max(std::abs(b), floor);
}

} // namespace oracle
