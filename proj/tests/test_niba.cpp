#include <doctest.h>

#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

#include "oracles.hpp"
#include "rabispec/bath.hpp"
#include "rabispec/errors.hpp"
#include "rabispec/niba.hpp"
#include "rabispec/specfun.hpp"
#include "rabispec/vanvleck.hpp"

using namespace rabispec;
using namespace rabispec::niba;

namespace {

const bath::CorrelationTable& preset_table() {
    static const bath::CorrelationTable table =
        bath::tabulate_q_total(0.5, 1.5, strong_dissipation_preset());
    return table;
}

KernelParams kparams(double eps0, double eps_d = 0.0) {
    KernelParams kp;
    kp.eps0 = eps0;
    kp.eps_d = eps_d;
    return kp;
}

// Direct kernels from the closed-form correlation functions (no table).
struct DirectKernel {
    BathSpec b = strong_dissipation_preset();
    bath::StructuredQ q2{effective_bath(0.5, 1.5, b.kappa), b.temp2};

    std::pair<double, double> operator()(double t) const {
        const auto a = bath::q1(t, b.alpha1, b.omega_c, b.temp1);
        const auto c = q2(t);
        const double amp = std::exp(-(a.re + c.re));
        return {amp * std::cos(a.im + c.im), amp * std::sin(a.im + c.im)};
    }
};

// r e^{i ph} for a real amplitude of either sign.
std::complex<double> scaled_phase(double r, double ph) {
    return {r * std::cos(ph), r * std::sin(ph)};
}

std::complex<double> simpson_c(const std::function<std::complex<double>(double)>& f, double a,
                               double b, double h) {
    const int n = 2 * static_cast<int>(std::ceil((b - a) / (2 * h)));
    return oracle::simpson(f, a, b, n);
}

} // namespace

TEST_CASE("kernel values") {
    const auto& t = preset_table();
    const auto h0 = kernel_h(0.0, kparams(0.3), t);
    CHECK(h0.plus == doctest::Approx(1.0));
    CHECK(h0.minus == 0.0);
    KernelParams two = kparams(0.0);
    two.delta = 2.0;
    CHECK(kernel_h(0.0, two, t).plus == doctest::Approx(4.0));
    KernelParams zero = kparams(0.0);
    zero.delta = 0.0;
    const auto hz = kernel_h(3.0, zero, t);
    CHECK(hz.plus == 0.0);
    CHECK(hz.minus == 0.0);
    for (double tau : {0.1, 1.0, 7.3, 40.0}) {
        const auto a = kernel_h(tau, kparams(0.2), t);
        const auto b = kernel_h_undriven(tau, 1.0, t);
        CHECK(a.plus == b.plus);
        CHECK(a.minus == b.minus);
        const auto d = kernel_h(tau, kparams(0.2, 3.0), t);
        const double j0 = specfun::bessel_j(0, 2 * (3.0 / 2.7) * std::sin(2.7 * tau / 2));
        CHECK(d.plus == doctest::Approx(b.plus * j0).epsilon(1e-14));
    }
}

TEST_CASE("k0 of the odd kernel vanishes at zero bias") {
    CHECK(k_hat_0(0.0, Sign::minus, kparams(0.0), preset_table()).value == std::complex<double>(0.0, 0.0));
}

TEST_CASE("k0 against a refined trapezoid rule") {
    const auto& table = preset_table();
    const DirectKernel direct;
    for (double eps0 : {0.0, 0.6}) {
        const auto k = k_hat_0(0.0, Sign::plus, kparams(eps0), table);
        CHECK(k.value.real() > 0.0);
        CHECK(k.value.imag() == 0.0);
        auto f = [&](double t) { return direct(t).first * std::cos(eps0 * t); };
        const double fine = table.fine_step() / 10;
        const double coarse = 5e-3 / 10;
        const double ref = oracle::trapezoid(f, 0.0, table.t_split(), std::lround(table.t_split() / fine)) +
                           oracle::trapezoid(f, table.t_split(), table.tau_max(),
                                             std::lround((table.tau_max() - table.t_split()) / coarse));
        CHECK(oracle::rel_diff(k.value.real(), ref) < 1e-6);
    }
}

TEST_CASE("k0 tolerance refinement stays within the reported error") {
    const auto& table = preset_table();
    QuadOptions loose;
    loose.rel_tol = 1e-6;
    QuadOptions tight;
    tight.rel_tol = 5e-7;
    for (auto lambda : {std::complex<double>(0.0, 0.0), std::complex<double>(0.0, -0.8)}) {
        const auto a = k_hat_0(lambda, Sign::plus, kparams(0.4), table, loose);
        const auto b = k_hat_0(lambda, Sign::plus, kparams(0.4), table, tight);
        CHECK(std::abs(a.value - b.value) < a.error);
    }
    CHECK_THROWS_AS(k_hat_0(std::complex<double>(-0.1, 0.0), Sign::plus, kparams(0.4), table), DomainError);
}

TEST_CASE("kernel transforms are even and odd in the bias") {
    const auto& table = preset_table();
    for (double eps0 : {0.2, 1.1}) {
        for (auto lambda : {std::complex<double>(0.0, 0.0), std::complex<double>(0.0, -0.7)}) {
            const auto pp = k_hat_0(lambda, Sign::plus, kparams(eps0), table).value;
            const auto pm = k_hat_0(lambda, Sign::plus, kparams(-eps0), table).value;
            const auto mp = k_hat_0(lambda, Sign::minus, kparams(eps0), table).value;
            const auto mm = k_hat_0(lambda, Sign::minus, kparams(-eps0), table).value;
            CHECK(std::abs(pp - pm) < 1e-12 * std::abs(pp));
            CHECK(std::abs(mp + mm) < 1e-12 * std::abs(mp));
        }
    }
}

TEST_CASE("first probe harmonic") {
    const auto& table = preset_table();
    CHECK(std::abs(kappa_hat_1(Sign::plus, 0.0, kparams(0.3), table).value) == 0.0);
    CHECK(std::abs(kappa_hat_1(Sign::minus, 0.0, kparams(0.3), table).value) == 0.0);

    // at zero bias the odd kernel enters with c+(0) = 1 and an overall + sign
    const double w = 0.9;
    auto f = [&](double t) {
        return scaled_phase(std::sin(w * t / 2), w * t / 2) * kernel_h(t, kparams(0.0), table).minus;
    };
    const auto ref = simpson_c(f, 0.0, table.tau_max(), 2e-3);
    const auto k = kappa_hat_1(Sign::minus, w, kparams(0.0), table).value;
    CHECK(std::abs(k - ref) < 1e-9 * std::abs(ref));
    // and the even kernel picks up sin(0) = 0
    CHECK(std::abs(kappa_hat_1(Sign::plus, w, kparams(0.0), table).value) == 0.0);
}

TEST_CASE("first probe harmonic is the small-amplitude limit of the Bessel form") {
    // The exact first harmonic of the probe phase is -/+ h c-/+ J1(2 z sin(w t/2)) e^{i w t/2}
    // with z = eps_p / omega_p; dividing by z must approach the returned value
    // with an error quadratic in z.
    const auto& table = preset_table();
    const double w = 0.7;
    const KernelParams kp = kparams(0.4);
    for (Sign sign : {Sign::plus, Sign::minus}) {
        const double pref = sign == Sign::plus ? -1.0 : 1.0;
        auto c_other = [&](double t) { return sign == Sign::plus ? std::sin(kp.eps0 * t) : std::cos(kp.eps0 * t); };
        auto h = [&](double t) {
            const auto k = kernel_h(t, kp, table);
            return sign == Sign::plus ? k.plus : k.minus;
        };
        auto full = [&](double z) {
            auto f = [&](double t) {
                const double x = 2 * z * std::sin(w * t / 2);
                return pref * scaled_phase(std::cyl_bessel_j(1.0, std::abs(x)) * (x < 0 ? -1.0 : 1.0) / z, w * t / 2) *
                       h(t) * c_other(t);
            };
            return simpson_c(f, 0.0, table.tau_max(), 2e-3);
        };
        auto lowest = [&] {
            auto f = [&](double t) { return pref * scaled_phase(std::sin(w * t / 2), w * t / 2) * h(t) * c_other(t); };
            return simpson_c(f, 0.0, table.tau_max(), 2e-3);
        }();
        const auto lib = kappa_hat_1(sign, w, kp, table).value;
        CHECK(std::abs(lib - lowest) < 1e-9 * std::abs(lowest));
        const double e2 = std::abs(full(1e-2) - lowest);
        const double e3 = std::abs(full(1e-3) - lowest);
        CHECK(e2 > 0.0);
        CHECK(e2 / e3 == doctest::Approx(100.0).epsilon(0.02));
    }
}

TEST_CASE("steady population") {
    const auto& table = preset_table();
    CHECK(steady_population(kparams(0.0), table).p0 == 0.0);
    for (double eps0 : {-2.0, -0.3, 0.05, 0.3, 1.0, 2.5}) {
        const auto p = steady_population(kparams(eps0), table);
        INFO("eps0 = " << eps0 << ", p0 - sign = " << p.p0 - std::copysign(1.0, eps0) << ", error = " << p.error);
        CHECK(std::abs(p.p0) <= 1.0 + p.error);
        CHECK(p.imag_residue < 1e-8);
        CHECK(p.p0 * eps0 > 0.0);
    }
}

TEST_CASE("steady population agrees with direct time propagation") {
    // P'(t) = int_0^t [K-(t - s) - K+(t - s) P(s)] ds from P(0) = 0, trapezoid
    // in s and an implicit trapezoid step for the s = t end point.
    const auto& table = preset_table();
    for (double eps0 : {0.1, -0.3}) {
        const double dt = 0.02;
        const int n = 6000;
        std::vector<double> kp(n + 1);
        std::vector<double> km(n + 1);
        for (int i = 0; i <= n; ++i) {
            const auto h = kernel_h_undriven(i * dt, 1.0, table);
            kp[i] = h.plus * std::cos(eps0 * i * dt);
            km[i] = h.minus * std::sin(eps0 * i * dt);
        }
        std::vector<double> p(n + 1, 0.0);
        double source = 0.0; // int_0^t K-
        std::vector<double> dp(n + 1, 0.0);
        for (int i = 1; i <= n; ++i) {
            source += 0.5 * dt * (km[i - 1] + km[i]);
            double conv = 0.5 * kp[i] * p[0];
            for (int j = 1; j < i; ++j) {
                conv += kp[i - j] * p[j];
            }
            conv *= dt;
            // P_i = P_{i-1} + dt/2 (dP_{i-1} + dP_i), dP_i = source - conv - dt/2 K+(0) P_i
            const double a = 0.5 * dt * kp[0] * 0.5 * dt;
            p[i] = (p[i - 1] + 0.5 * dt * (dp[i - 1] + source - conv)) / (1.0 + a);
            dp[i] = source - conv - 0.5 * dt * kp[0] * p[i];
        }
        const double p0 = steady_population(kparams(eps0), table).p0;
        CHECK(p[n] * eps0 > 0.0);
        CHECK(std::abs(p[n] - p0) < 0.02);
    }
}

TEST_CASE("susceptibility vanishes without tunneling") {
    KernelParams kp = kparams(0.3);
    kp.delta = 0.0;
    const auto s = susceptibility(0.5, kp, preset_table(), Mode::full);
    CHECK(std::abs(s.chi) == 0.0);
}

TEST_CASE("susceptibility does not depend on the probe amplitude") {
    static_assert(sizeof(KernelParams) == 5 * sizeof(double));
    ModelParams a;
    a.g = 0.5;
    a.eps0 = 0.2;
    ModelParams b = a;
    b.eps_p = 0.3;
    const auto ka = kernel_params(a);
    const auto kb = kernel_params(b);
    const auto sa = susceptibility(0.5, ka, preset_table(), Mode::full);
    const auto sb = susceptibility(0.5, kb, preset_table(), Mode::full);
    CHECK(sa.chi == sb.chi);
}

TEST_CASE("engine rows reproduce the adaptive susceptibility") {
    const auto& table = preset_table();
    for (double eps_d : {0.0, 2.0}) {
        const KernelParams base = kparams(0.0, eps_d);
        const SusceptibilityEngine engine(base, table, grid_omega_max(3.0, 3.0, base));
        for (double eps0 : {-1.2, 0.0, 0.5}) {
            const auto row = engine.row(eps0);
            CHECK(row.p0() == doctest::Approx(steady_population(kparams(eps0, eps_d), table).p0).epsilon(1e-9));
            for (double w : {0.1, 0.6, 2.4}) {
                for (Mode mode : {Mode::full, Mode::markov}) {
                    const auto fast = row(w, mode);
                    const auto slow = susceptibility(w, kparams(eps0, eps_d), table, mode);
                    CHECK(std::abs(fast.chi - slow.chi) < 1e-8 * std::abs(slow.chi) + 1e-12);
                    CHECK(fast.quad_error < 1e-6);
                }
            }
        }
    }
}

TEST_CASE("driven path without drive equals the undriven path") {
    const auto& table = preset_table();
    const KernelParams base = kparams(0.0);
    const double wmax = grid_omega_max(3.0, 3.0, base);
    const SusceptibilityEngine driven(base, table, wmax, SusceptibilityEngine::KernelPath::driven);
    const SusceptibilityEngine undriven(base, table, wmax, SusceptibilityEngine::KernelPath::undriven);
    double worst = 0.0;
    for (double eps0 : {-2.0, 0.0, 0.7}) {
        const auto a = driven.row(eps0);
        const auto b = undriven.row(eps0);
        for (double w = 0.05; w < 3.0; w += 0.1) {
            const auto ca = a(w, Mode::full).chi;
            const auto cb = b(w, Mode::full).chi;
            worst = std::max(worst, std::abs(ca - cb) / std::abs(cb));
        }
    }
    CHECK(worst < 1e-12);
    CHECK_THROWS_AS(SusceptibilityEngine(kparams(0.0, 1.0), table, wmax, SusceptibilityEngine::KernelPath::undriven),
                    DomainError);
}

TEST_CASE("main resonance at zero bias") {
    const auto& table = preset_table();
    const BathSpec b = strong_dissipation_preset();
    const KernelParams base = kparams(0.0);
    const SusceptibilityEngine engine(base, table, grid_omega_max(3.0, 3.0, base));
    const auto row = engine.row(0.0);
    const double step = (3.0 - 0.015) / 200;
    double best_full = 0.0, best_markov = 0.0, peak_full = -1.0, peak_markov = -1.0;
    double min_denominator = 1e300;
    for (int i = 0; i <= 200; ++i) {
        const double w = 0.015 + step * i;
        const auto f = row(w, Mode::full);
        const auto m = row(w, Mode::markov);
        min_denominator = std::min(min_denominator, f.denominator_modulus);
        if (w * f.chi.imag() > peak_full) {
            peak_full = w * f.chi.imag();
            best_full = w;
        }
        if (w * m.chi.imag() > peak_markov) {
            peak_markov = w * m.chi.imag();
            best_markov = w;
        }
    }
    CHECK(min_denominator > 0.0);
    const double at = alpha_tilde(0.5, 1.5);
    const double predicted = renormalized_delta(1.0, b.alpha1, b.omega_c, b.temp1) * std::exp(-at / 2);
    CHECK(std::abs(best_full - predicted) <= step);
    // The Markovian denominator is frequency independent, so the coherent
    // resonance is absent there and the response stays flat.
    CHECK(peak_markov < 0.2 * peak_full);
    CHECK(std::abs(best_full - best_markov) > step);
    const auto at_peak = row(best_full, Mode::full).chi;
    CHECK(at_peak.imag() > std::abs(at_peak.real()));
}

TEST_CASE("grid frequency bound covers bias, probe and drive") {
    const KernelParams kp = kparams(0.0, 2.0);
    CHECK(grid_omega_max(3.0, 2.0, kp) == doctest::Approx(3.0 + 2.0 + 3.0 + 2.0 + 5.4));
    CHECK(grid_omega_max(3.0, 2.0, kparams(0.0)) == doctest::Approx(8.0));
}
