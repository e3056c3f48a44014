#include "rabispec/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rabispec/errors.hpp"

namespace rabispec::specfun {

double laguerre(int k, int j, double x) {
    if (k < 0 || j < 0) {
        throw DomainError("laguerre: k and j must be >= 0");
    }
    if (j == 0) {
        return 1.0;
    }
    double prev = 1.0;
    double cur = 1.0 + k - x;
    for (int i = 1; i < j; ++i) {
        const double next = ((2.0 * i + 1.0 + k - x) * cur - (i + k) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

namespace {

// Miller's downward recurrence normalized with J0 + 2 sum J_2k = 1.
double bessel_j_miller(int n, double x) {
    const double ax = std::abs(x);
    const int top = std::max(n, static_cast<int>(std::ceil(ax)));
    int start = top + 30 + static_cast<int>(std::sqrt(60.0 * top));
    start += start % 2; // even, so the normalization sum pairs correctly

    constexpr double kBig = 1e250;
    double jp1 = 0.0;
    double jk = 1e-300;
    double norm = 0.0;
    double result = 0.0;
    for (int k = start; k > 0; --k) {
        const double jm1 = 2.0 * k / ax * jk - jp1;
        jp1 = jk;
        jk = jm1;
        if (std::abs(jk) > kBig) {
            jk /= kBig;
            jp1 /= kBig;
            norm /= kBig;
            result /= kBig;
        }
        // jk now holds the unnormalized J_{k-1}
        if ((k - 1) % 2 == 0 && k - 1 > 0) {
            norm += 2.0 * jk;
        }
        if (k - 1 == n) {
            result = jk;
        }
    }
    norm += jk;
    return result / norm;
}

} // namespace

double bessel_j(int n, double x) {
    if (std::abs(x) > 50.0 || std::abs(n) > 60 || !std::isfinite(x)) {
        throw DomainError("bessel_j: outside validated range |x| <= 50, |n| <= 60 (n=" +
                          std::to_string(n) + ", x=" + std::to_string(x) + ")");
    }
    double sign = 1.0;
    if (n < 0) {
        n = -n;
        if (n % 2 != 0) {
            sign = -sign;
        }
    }
    if (x < 0.0 && n % 2 != 0) {
        sign = -sign;
    }
    if (x == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return sign * bessel_j_miller(n, std::abs(x));
}

double dressing_factor(int k, int j, double alpha_tilde) {
    if (k < 0 || j < 0) {
        throw DomainError("dressing_factor: k and j must be >= 0");
    }
    if (alpha_tilde < 0.0) {
        throw DomainError("dressing_factor: alpha_tilde must be >= 0");
    }
    const double lag = laguerre(k, j, alpha_tilde);
    if (alpha_tilde == 0.0) {
        return k == 0 ? lag : 0.0;
    }
    const double log_mag = 0.5 * k * std::log(alpha_tilde) +
                           0.5 * (std::lgamma(j + 1.0) - std::lgamma(j + k + 1.0)) -
                           0.5 * alpha_tilde;
    return std::exp(log_mag) * lag;
}

double dressed_delta_static(double delta, int j, int j_prime, double alpha_tilde) {
    if (j < 0 || j_prime < 0) {
        throw DomainError("dressed_delta_static: oscillator indices must be >= 0");
    }
    const int k = std::abs(j_prime - j);
    // [sgn(j'-j)]^{|j'-j|} is -1 only for odd k with j' < j
    const double sign = (j_prime < j && k % 2 != 0) ? -1.0 : 1.0;
    return delta * sign * dressing_factor(k, std::min(j, j_prime), alpha_tilde);
}

double dressed_delta_driven(double delta, int n, int n_prime, int j, int j_prime,
                            const DressingArgs& args) {
    const double bessel = bessel_j(n_prime - n, args.drive_ratio);
    if (bessel == 0.0) {
        return 0.0;
    }
    return bessel * dressed_delta_static(delta, j, j_prime, args.alpha_tilde);
}

} // namespace rabispec::specfun
