#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rabispec/bath.hpp"
#include "rabispec/errors.hpp"

using namespace rabispec;
using namespace rabispec::bath;

namespace {

constexpr double kPi = std::numbers::pi;

// ln[sinh(x)/x] from the product sinh(x)/x = prod_n (1 + x^2/(n pi)^2),
// with the remainder of the log-sum approximated by its integral.
double log_sinhc_product(double x) {
    const long n_terms = 2'000'000;
    long double s = 0.0L;
    for (long n = n_terms; n >= 1; --n) {
        const long double r = static_cast<long double>(x) / (kPi * static_cast<long double>(n));
        s += std::log1p(r * r);
    }
    const long double c = x / kPi;
    const long double nn = n_terms + 0.5L;
    // int_{N+1/2}^inf ln(1 + c^2/n^2) dn
    s += c * (kPi / 2 - std::atan(nn / c)) * 2.0L - nn * std::log1p(c * c / (nn * nn));
    return static_cast<double>(s);
}

// Exact Ohmic correlation with exponential cutoff at finite omega_c:
// Q1' = alpha [ln(1 + wc^2 t^2) + 2 sum_n ln(1 + t^2/(n beta + 1/wc)^2)].
double q1_exact_re(double t, double alpha, double wc, double temp) {
    const double beta = 1.0 / temp;
    long double s = std::log1p(static_cast<long double>(wc * wc * t * t));
    const long n_terms = 2'000'000;
    for (long n = n_terms; n >= 1; --n) {
        const long double d = static_cast<long double>(n) * beta + 1.0L / wc;
        s += 2.0L * std::log1p(static_cast<long double>(t) * t / (d * d));
    }
    // tail of 2 sum ln(1 + t^2/(n beta)^2) ~ 2 t^2 / (beta^2 N)
    s += 2.0L * static_cast<long double>(t) * t / (beta * beta * (n_terms + 0.5L));
    return static_cast<double>(alpha * s);
}

BathSpec preset() { return strong_dissipation_preset(); }

} // namespace

TEST_CASE("spectral densities") {
    const auto g1 = SpectralDensity::ohmic(0.1, 10.0);
    CHECK(g1(2.0) == doctest::Approx(2 * 0.1 * 2.0 * std::exp(-0.2)).epsilon(1e-15));
    CHECK(g1.over_w(0.0) == doctest::Approx(0.2));
    const auto eff = effective_bath(0.5, 1.5, 0.05);
    const auto g2 = SpectralDensity::structured(eff);
    for (double w : {0.0, 0.3, 1.5, 4.0, 100.0}) {
        const double d = (2.25 - w * w) * (2.25 - w * w) + eff.gamma * eff.gamma * w * w;
        CHECK(g2(w) == doctest::Approx(2 * eff.alpha2 * w * 2.25 * 2.25 / d).epsilon(1e-14));
        CHECK(g2(w) >= 0.0);
        CHECK(g1(w) >= 0.0);
    }
    CHECK_THROWS_AS(SpectralDensity::structured(0.1, 1.0, 2.0), DomainError);
}

TEST_CASE("q1 closed form") {
    const auto z = q1(0.0, 0.1, 10.0, 0.1);
    CHECK(z.re == 0.0);
    CHECK(z.im == 0.0);
    CHECK(q1(1e9, 0.1, 10.0, 0.1).im == doctest::Approx(kPi * 0.1).epsilon(1e-9));
    // the overflow guard keeps the log form finite far beyond sinh's range
    CHECK(std::isfinite(q1(1e5, 0.1, 10.0, 0.1).re));
    CHECK_THROWS_AS(q1(1.0, 0.1, 10.0, 0.0), DomainError);
    CHECK_THROWS_AS(q1(-1.0, 0.1, 10.0, 0.1), DomainError);
}

TEST_CASE("q1 real part against an independent product formula") {
    const double alpha = 0.1, wc = 10.0, temp = 0.1;
    for (double t : {1e-4, 0.05, 0.5, 2.0, 5.0, 10.0, 40.0}) {
        const double x = kPi * t * temp;
        const double ref = alpha * std::log1p(wc * wc * t * t) + 2 * alpha * log_sinhc_product(x);
        CHECK(q1(t, alpha, wc, temp).re == doctest::Approx(ref).epsilon(1e-10));
    }
}

TEST_CASE("q1 imaginary part is the exact quadrature") {
    const auto g1 = SpectralDensity::ohmic(0.1, 10.0);
    for (double t : {0.5, 2.0, 10.0}) {
        CHECK(q1(t, 0.1, 10.0, 0.1).im == doctest::Approx(q_numeric(t, g1, 0.1).im).epsilon(1e-10));
    }
}

TEST_CASE("quadrature oracle reproduces the exact finite-cutoff Ohmic series") {
    const auto g1 = SpectralDensity::ohmic(0.1, 10.0);
    for (double t : {0.5, 2.0, 10.0}) {
        CHECK(q_numeric(t, g1, 0.1).re == doctest::Approx(q1_exact_re(t, 0.1, 10.0, 0.1)).epsilon(1e-9));
    }
}

TEST_CASE("scaling-limit deviation from the finite-cutoff correlation") {
    // The closed form drops the 1/omega_c shift of the thermal terms. The
    // deviation is below 1e-4 at short times and grows with t.
    const auto g1 = SpectralDensity::ohmic(0.1, 10.0);
    const double short_dev = oracle::rel_diff(q1(0.5, 0.1, 10.0, 0.1).re, q_numeric(0.5, g1, 0.1).re);
    CHECK(short_dev < 1e-4);
    double prev = short_dev;
    for (double t : {2.0, 5.0, 10.0}) {
        const double dev = oracle::rel_diff(q1(t, 0.1, 10.0, 0.1).re, q_numeric(t, g1, 0.1).re);
        CHECK(dev > prev);
        CHECK(dev < 5e-3);
        prev = dev;
    }
}

TEST_CASE("q2 closed form against quadrature") {
    const auto eff = effective_bath(0.5, 1.5, 0.05);
    const auto g2 = SpectralDensity::structured(eff);
    for (double t : {0.5, 2.0, 10.0}) {
        const auto a = q2(t, eff, 0.1);
        const auto b = q_numeric(t, g2, 0.1);
        CHECK(oracle::rel_diff(a.re, b.re) < 1e-6);
        CHECK(oracle::rel_diff(a.im, b.im) < 1e-6);
        CHECK(a.terms > 0);
    }
}

TEST_CASE("q2 limits") {
    const auto eff = effective_bath(0.5, 1.5, 0.05);
    const auto z = q2(0.0, eff, 0.1);
    CHECK(z.re == 0.0);
    CHECK(z.im == 0.0);
    CHECK(q2(400.0, eff, 0.1).im == doctest::Approx(kPi * eff.alpha2).epsilon(1e-12));
    const auto none = q2(3.0, effective_bath(0.5, 1.5, 0.0), 0.1);
    CHECK(none.re == 0.0);
    CHECK(none.im == 0.0);
    CHECK_THROWS_AS(q2(1.0, eff, 0.0), DomainError);
}

TEST_CASE("q2 high temperature uses many Matsubara terms only at short times") {
    const auto eff = effective_bath(0.8, 1.5, 0.02);
    const auto g2 = SpectralDensity::structured(eff);
    for (double temp : {0.02, 1.0}) {
        for (double t : {0.01, 0.3, 3.0}) {
            CHECK(oracle::rel_diff(q2(t, eff, temp).re, q_numeric(t, g2, temp).re) < 1e-6);
        }
    }
}

TEST_CASE("Matsubara tail bound is honest") {
    const auto eff = effective_bath(0.5, 1.5, 0.05);
    for (double t : {0.05, 0.5, 2.0, 10.0}) {
        const auto coarse = q2(t, eff, 0.1, 1e-6);
        const auto fine = q2(t, eff, 0.1, 5e-7);
        CHECK(std::abs(coarse.re - fine.re) <= coarse.tail + 1e-15);
    }
}

TEST_CASE("sum rule of the structured density") {
    const double g = 0.5;
    const auto eff = effective_bath(g, 1.5, 0.005);
    const double w = spectral_weight(SpectralDensity::structured(eff));
    CHECK(std::abs(w - 4 * g * g) / (4 * g * g) < 0.01);
    // independent check with a plain Simpson rule plus the 1/w^3 tail
    const auto g2 = SpectralDensity::structured(eff);
    const double cut = 200.0;
    const double simpson = oracle::simpson([&](double x) { return g2(x); }, 0.0, cut, 2'000'000);
    const double tail = eff.alpha2 * std::pow(1.5, 4) / (cut * cut);
    CHECK(w == doctest::Approx(simpson + tail).epsilon(1e-6));
}

TEST_CASE("quadrature oracle at the origin and its tolerance contract") {
    const auto g1 = SpectralDensity::ohmic(0.1, 10.0);
    const auto z = q_numeric(0.0, g1, 0.1);
    CHECK(z.re == 0.0);
    CHECK(z.im == 0.0);
    CHECK_THROWS_AS(q_numeric(1.0, g1, 0.0), DomainError);
}

TEST_CASE("table pieces") {
    BathSpec b = preset();
    b.kappa = 0.0;
    const auto only1 = tabulate_q_total(0.5, 1.5, b);
    for (std::size_t i = 0; i < only1.tau_grid().size(); i += 997) {
        const auto q = q1(only1.tau_grid()[i], b.alpha1, b.omega_c, b.temp1);
        CHECK(only1.q_re()[i] == q.re);
        CHECK(only1.q_im()[i] == q.im);
    }
    BathSpec c = preset();
    c.alpha1 = 0.0;
    const auto only2 = tabulate_q_total(0.5, 1.5, c);
    const StructuredQ s(effective_bath(0.5, 1.5, c.kappa), c.temp2);
    for (std::size_t i = 0; i < only2.tau_grid().size(); i += 997) {
        const auto q = s(only2.tau_grid()[i]);
        CHECK(only2.q_re()[i] == q.re);
        CHECK(only2.q_im()[i] == q.im);
    }
}

TEST_CASE("table invariants and interpolation accuracy") {
    const BathSpec b = preset();
    const auto table = tabulate_q_total(0.5, 1.5, b);
    const auto eff = effective_bath(0.5, 1.5, b.kappa);
    const StructuredQ s(eff, b.temp2);
    CHECK(table.q_re()[0] == 0.0);
    CHECK(table.q_im()[0] == 0.0);
    CHECK(std::exp(-table.q_re().back()) < 1e-8);
    CHECK(table.decay_rate() == doctest::Approx(2 * kPi * 0.1 * 0.1 + 2 * kPi * eff.alpha2 * 0.1).epsilon(1e-14));
    for (std::size_t i = 1; i < table.tau_grid().size(); ++i) {
        REQUIRE(table.tau_grid()[i] > table.tau_grid()[i - 1]);
        CHECK(table.q_re()[i] >= 0.0);
    }

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, table.tau_max());
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = i < 200 ? u(rng) * 10.0 / table.tau_max() : u(rng);
        const auto direct_1 = q1(t, b.alpha1, b.omega_c, b.temp1);
        const auto direct_2 = s(t);
        const auto v = table(t);
        worst = std::max(worst, std::abs(v.re - direct_1.re - direct_2.re));
        worst = std::max(worst, std::abs(v.im - direct_1.im - direct_2.im));
    }
    CHECK(worst < 1e-8);
    CHECK_THROWS_AS(table(table.tau_max() * 1.01), DomainError);
}

TEST_CASE("asymptotic slope of the real part") {
    const BathSpec b = preset();
    const auto eff = effective_bath(0.5, 1.5, b.kappa);
    const StructuredQ s(eff, b.temp2);
    const double expected = 2 * kPi * b.alpha1 * b.temp1 + 2 * kPi * eff.alpha2 * b.temp2;
    const double t = 200.0, h = 1.0;
    auto re = [&](double x) { return q1(x, b.alpha1, b.omega_c, b.temp1).re + s(x).re; };
    const double slope = (re(t + h) - re(t - h)) / (2 * h);
    CHECK(std::abs(slope - expected) < 1e-3);
    CHECK(s.slope() == doctest::Approx(2 * kPi * eff.alpha2 * b.temp2).epsilon(1e-15));
}

TEST_CASE("table rejects undamped kernels") {
    BathSpec b = preset();
    b.alpha1 = 0.0;
    b.kappa = 0.0;
    CHECK_THROWS_AS(tabulate_q_total(0.5, 1.5, b), NumericalError);
    b.alpha1 = 1e-7;
    TableOptions opts;
    opts.tau_cap = 1e3;
    CHECK_THROWS_AS(tabulate_q_total(0.5, 1.5, b, opts), NumericalError);
}

TEST_CASE("explicit table length is honoured") {
    TableOptions opts;
    opts.tau_max = 30.0;
    const auto table = tabulate_q_total(0.5, 1.5, preset(), opts);
    CHECK(table.tau_max() == doctest::Approx(30.0).epsilon(1e-9));
}
