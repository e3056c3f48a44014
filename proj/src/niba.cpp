#include "rabispec/niba.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rabispec/errors.hpp"
#include "rabispec/quadrature.hpp"
#include "rabispec/specfun.hpp"

namespace rabispec::niba {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr cdouble kI{0.0, 1.0};

double drive_ratio(const KernelParams& kp) {
    return kp.eps_d == 0.0 ? 0.0 : kp.eps_d / kp.omega_d;
}

double drive_factor(double tau, const KernelParams& kp) {
    const double x = drive_ratio(kp);
    if (x == 0.0) {
        return 1.0;
    }
    return specfun::bessel_j(0, 2.0 * x * std::sin(0.5 * kp.omega_d * tau));
}

// Highest frequency carried by the kernels themselves.
double kernel_omega(const KernelParams& kp, const bath::CorrelationTable& table) {
    double w = 2.0 * std::max(kp.omega_r, table.omega_bar());
    const double x = std::abs(drive_ratio(kp));
    if (x > 0.0) {
        w += kp.omega_d * (x + 2.0);
    }
    return w;
}

// Bound on int_{tau_max}^inf |h| dt for Delta = 1: e^{-Q'} keeps decaying at
// least at the asymptotic rate.
double truncation_bound(const bath::CorrelationTable& table) {
    const double rate = table.decay_rate();
    const double edge = std::exp(-table.q_re().back());
    return rate > 0.0 ? edge / rate : edge * table.tau_max();
}

struct PanelPlan {
    double split;
    double width_fine;
    double width_coarse;
};

PanelPlan plan_panels(const bath::CorrelationTable& table, double omega_max) {
    const double w = kTwoPi / (8.0 * omega_max);
    return {table.t_split(), std::min(w, 1.0 / table.omega_c()), w};
}

std::size_t panel_count(double length, double width) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(length / width - 1e-9)));
}

void require_kernel_params(const KernelParams& kp) {
    if (!std::isfinite(kp.delta) || kp.delta < 0.0 || !std::isfinite(kp.eps0) ||
        !std::isfinite(kp.eps_d) || !(kp.omega_r > 0.0)) {
        throw DomainError("niba: delta >= 0, finite eps0/eps_d and omega_r > 0 required");
    }
    if (kp.eps_d != 0.0 && !(kp.omega_d > 0.0)) {
        throw DomainError("niba: omega_d > 0 required for a driven kernel");
    }
}

// Adaptive integral of f over [0, tau_max] with panels sized for the
// frequency `omega` (in addition to the kernel's own frequencies).
template <typename F>
Integral adaptive_transform(F&& f, double omega, const KernelParams& kp,
                            const bath::CorrelationTable& table, const QuadOptions& opts) {
    require_kernel_params(kp);
    const double omega_max = kernel_omega(kp, table) + std::abs(kp.eps0) + std::abs(omega);
    const PanelPlan plan = plan_panels(table, omega_max);
    const double tau_max = table.tau_max();
    const double split = std::min(plan.split, tau_max);

    auto run = [&](auto&& g, double abs_tol, int depth) {
        const auto a = quad::integrate(g, 0.0, split, abs_tol * split / tau_max,
                                       panel_count(split, plan.width_fine), depth);
        using R = std::decay_t<decltype(a)>;
        R out = a;
        if (tau_max > split) {
            const auto b = quad::integrate(g, split, tau_max, abs_tol * (tau_max - split) / tau_max,
                                           panel_count(tau_max - split, plan.width_coarse), depth);
            out.value += b.value;
            out.error += b.error;
        }
        return out;
    };

    const auto rough = run(f, 1e300, 0);
    const auto norm = run(
        [&](double t) {
            const KernelPair h = kernel_h(t, KernelParams{1.0, 0.0, kp.eps_d, kp.omega_d, kp.omega_r}, table);
            return std::abs(h.plus) + std::abs(h.minus);
        },
        1e300, 0);
    const double d2 = kp.delta * kp.delta;
    const double target =
        std::max(0.1 * opts.rel_tol * std::abs(rough.value), 1e-3 * opts.rel_tol * d2 * norm.value);
    const auto fine = run(f, target, opts.max_depth);
    if (fine.error > 10.0 * target && fine.error > 1e-300) {
        throw ToleranceError("niba: kernel transform tolerance not met", fine.error);
    }
    return {fine.value, fine.error + d2 * truncation_bound(table)};
}

double unit_kernel(const KernelPair& h, Sign s) {
    return s == Sign::plus ? h.plus : h.minus;
}

} // namespace

KernelParams kernel_params(const ModelParams& params) {
    return {params.delta, params.eps0, params.eps_d, params.omega_d, params.omega_r};
}

KernelPair kernel_h(double tau, const KernelParams& kp, const bath::CorrelationTable& table) {
    const bath::QValue q = table(tau);
    const double amp = kp.delta * kp.delta * std::exp(-q.re) * drive_factor(tau, kp);
    return {amp * std::cos(q.im), amp * std::sin(q.im)};
}

KernelPair kernel_h_undriven(double tau, double delta, const bath::CorrelationTable& table) {
    const bath::QValue q = table(tau);
    const double amp = delta * delta * std::exp(-q.re);
    return {amp * std::cos(q.im), amp * std::sin(q.im)};
}

Integral k_hat_0(cdouble lambda, Sign sign, const KernelParams& kp,
                 const bath::CorrelationTable& table, const QuadOptions& opts) {
    if (!(lambda.real() >= 0.0)) {
        throw DomainError("k_hat_0: Re lambda >= 0 required");
    }
    auto f = [&](double t) -> cdouble {
        const double h = unit_kernel(kernel_h(t, kp, table), sign);
        const double c = sign == Sign::plus ? std::cos(kp.eps0 * t) : std::sin(kp.eps0 * t);
        return std::exp(-lambda * t) * (h * c);
    };
    return adaptive_transform(f, lambda.imag(), kp, table, opts);
}

Integral kappa_hat_1(Sign sign, double omega_p, const KernelParams& kp,
                     const bath::CorrelationTable& table, const QuadOptions& opts) {
    const double pref = sign == Sign::plus ? -1.0 : 1.0;
    auto f = [&](double t) -> cdouble {
        const double h = unit_kernel(kernel_h(t, kp, table), sign);
        const double c = sign == Sign::plus ? std::sin(kp.eps0 * t) : std::cos(kp.eps0 * t);
        // e^{i w t / 2} sin(w t / 2)
        const double half = 0.5 * omega_p * t;
        const double s = std::sin(half);
        const cdouble phase(s * std::cos(half), s * s);
        return pref * phase * (h * c);
    };
    return adaptive_transform(f, omega_p, kp, table, opts);
}

Population steady_population(const KernelParams& kp, const bath::CorrelationTable& table,
                             const QuadOptions& opts) {
    KernelParams unit = kp;
    unit.delta = 1.0;
    const Integral plus = k_hat_0(0.0, Sign::plus, unit, table, opts);
    const Integral minus = k_hat_0(0.0, Sign::minus, unit, table, opts);
    if (std::abs(plus.value) < 1e-12) {
        throw NumericalError("steady_population: degenerate kernel, |k0+(0)| < 1e-12 Delta^2");
    }
    const cdouble p = minus.value / plus.value;
    const double err = (minus.error + std::abs(p) * plus.error) / std::abs(plus.value);
    return {p.real(), std::abs(p.imag()), err};
}

SusceptibilityPoint susceptibility(double omega_p, const KernelParams& kp,
                                   const bath::CorrelationTable& table, Mode mode,
                                   const QuadOptions& opts) {
    if (!(omega_p > 0.0)) {
        throw DomainError("susceptibility: omega_p > 0 required");
    }
    SusceptibilityPoint out;
    out.omega_p = omega_p;
    const Population pop = steady_population(kp, table, opts);
    const Integral k0p = k_hat_0(0.0, Sign::plus, kp, table, opts);
    const Integral k0m = k_hat_0(0.0, Sign::minus, kp, table, opts);
    const Integral k0w = k_hat_0(cdouble(0.0, -omega_p), Sign::plus, kp, table, opts);
    const Integral c1p = kappa_hat_1(Sign::plus, omega_p, kp, table, opts);
    const Integral c1m = kappa_hat_1(Sign::minus, omega_p, kp, table, opts);
    out.k0_plus_0 = k0p.value;
    out.k0_minus_0 = k0m.value;
    out.k0_plus_at_minus_i_omega_p = k0w.value;
    out.kappa1_plus = c1p.value;
    out.kappa1_minus = c1m.value;
    const cdouble denom =
        -kI * omega_p + (mode == Mode::full ? k0w.value : k0p.value);
    out.denominator_modulus = std::abs(denom);
    out.chi = (c1m.value - c1p.value * pop.p0) / (omega_p * denom);
    out.quad_error = std::max({k0p.error, k0m.error, k0w.error, c1p.error, c1m.error});
    return out;
}

double grid_omega_max(double max_abs_eps0, double max_omega_p, const KernelParams& kp) {
    double w = std::abs(max_abs_eps0) + std::abs(max_omega_p) + 2.0 * kp.omega_r;
    if (kp.eps_d != 0.0) {
        w += std::abs(kp.eps_d) + 2.0 * kp.omega_d;
    }
    return w;
}

// ---------------------------------------------------------------------------
// Engine

SusceptibilityEngine::SusceptibilityEngine(const KernelParams& kp,
                                           const bath::CorrelationTable& table,
                                           double omega_max, KernelPath path)
    : kp_(kp)
    , omega_max_(std::max(omega_max, kernel_omega(kp, table)))
    , tail_(truncation_bound(table)) {
    require_kernel_params(kp);
    if (path == KernelPath::undriven && kp.eps_d != 0.0) {
        throw DomainError("SusceptibilityEngine: the undriven kernel path requires eps_d = 0");
    }
    const PanelPlan plan = plan_panels(table, omega_max_);
    const double tau_max = table.tau_max();
    const double split = std::min(plan.split, tau_max);
    const std::size_t n1 = panel_count(split, plan.width_fine);
    segments_.push_back({0.0, split / static_cast<double>(n1), n1, 0});
    if (tau_max > split) {
        const std::size_t n2 = panel_count(tau_max - split, plan.width_coarse);
        segments_.push_back({split, (tau_max - split) / static_cast<double>(n2), n2, 15 * n1});
    }

    std::size_t total = 0;
    for (const auto& s : segments_) {
        total += 15 * s.panels;
    }
    tau_.resize(total);
    hp_.resize(total);
    hm_.resize(total);
    for (const auto& s : segments_) {
        const double half = 0.5 * s.width;
        for (std::size_t k = 0; k < s.panels; ++k) {
            // The last panel ends exactly at the segment end.
            const double a = s.start + s.width * static_cast<double>(k);
            for (std::size_t i = 0; i < 15; ++i) {
                const std::size_t idx = s.offset + 15 * k + i;
                const double t = a + half * (1.0 + quad::kKronrodNodes[i]);
                tau_[idx] = t;
                const KernelPair h = path == KernelPath::driven
                                         ? kernel_h(t, KernelParams{1.0, 0.0, kp.eps_d, kp.omega_d, kp.omega_r}, table)
                                         : kernel_h_undriven(t, 1.0, table);
                const double w = half * quad::kKronrodWeights[i];
                hp_[idx] = w * h.plus;
                hm_[idx] = w * h.minus;
            }
        }
    }
}

void SusceptibilityEngine::transform3(double w, const double* f0, const double* f1,
                                      const double* f2, cdouble out[3], bool error_weights,
                                      double err[3]) const {
    double sr[3] = {0.0, 0.0, 0.0};
    double si[3] = {0.0, 0.0, 0.0};
    double er[3] = {0.0, 0.0, 0.0};
    for (const auto& s : segments_) {
        double ore[15];
        double oim[15];
        double dre[15];
        double dim[15];
        for (std::size_t i = 0; i < 15; ++i) {
            const double ph = w * 0.5 * s.width * (1.0 + quad::kKronrodNodes[i]);
            ore[i] = std::cos(ph);
            oim[i] = std::sin(ph);
            const double r = 1.0 - quad::kGaussWeights[i] / quad::kKronrodWeights[i];
            dre[i] = r * ore[i];
            dim[i] = r * oim[i];
        }
        const double step_re = std::cos(w * s.width);
        const double step_im = std::sin(w * s.width);
        double zr = std::cos(w * s.start);
        double zi = std::sin(w * s.start);
        for (std::size_t k = 0; k < s.panels; ++k) {
            const std::size_t base = s.offset + 15 * k;
            const double* p[3] = {f0 + base, f1 + base, f2 + base};
            for (int a = 0; a < 3; ++a) {
                double pr = 0.0;
                double pi = 0.0;
                for (std::size_t i = 0; i < 15; ++i) {
                    pr += ore[i] * p[a][i];
                    pi += oim[i] * p[a][i];
                }
                sr[a] += zr * pr - zi * pi;
                si[a] += zr * pi + zi * pr;
                if (error_weights) {
                    double qr = 0.0;
                    double qi = 0.0;
                    for (std::size_t i = 0; i < 15; ++i) {
                        qr += dre[i] * p[a][i];
                        qi += dim[i] * p[a][i];
                    }
                    er[a] += std::hypot(qr, qi);
                }
            }
            if ((k + 1) % 32 == 0) {
                const double ph = w * (s.start + s.width * static_cast<double>(k + 1));
                zr = std::cos(ph);
                zi = std::sin(ph);
            } else {
                const double nr = zr * step_re - zi * step_im;
                zi = zr * step_im + zi * step_re;
                zr = nr;
            }
        }
    }
    for (int a = 0; a < 3; ++a) {
        out[a] = cdouble(sr[a], si[a]);
        if (err != nullptr) {
            err[a] = er[a];
        }
    }
}

SusceptibilityEngine::Row SusceptibilityEngine::row(double eps0) const {
    if (!std::isfinite(eps0)) {
        throw DomainError("SusceptibilityEngine::row: eps0 must be finite");
    }
    Row r;
    r.engine_ = this;
    r.eps0_ = eps0;
    const std::size_t n = tau_.size();
    r.a_.resize(n);
    r.b_.resize(n);
    r.c_.resize(n);
    quad::CompensatedSum<double> k0p;
    quad::CompensatedSum<double> k0m;
    quad::CompensatedSum<double> sb;
    quad::CompensatedSum<double> sc;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(eps0 * tau_[i]);
        const double s = std::sin(eps0 * tau_[i]);
        r.a_[i] = hp_[i] * c;
        r.b_[i] = hp_[i] * s;
        r.c_[i] = hm_[i] * c;
        k0p.add(r.a_[i]);
        k0m.add(hm_[i] * s);
        sb.add(r.b_[i]);
        sc.add(r.c_[i]);
    }
    r.k0p_ = k0p.value();
    r.k0m_ = k0m.value();
    r.sum_b_ = sb.value();
    r.sum_c_ = sc.value();
    if (std::abs(r.k0p_) < 1e-12) {
        std::ostringstream os;
        os << "degenerate kernel at eps0=" << eps0 << ": |k0+(0)| < 1e-12 Delta^2";
        throw NumericalError(os.str());
    }
    r.p0_ = r.k0m_ / r.k0p_;

    cdouble dummy[3];
    double err[3];
    transform3(omega_max_, r.a_.data(), r.b_.data(), r.c_.data(), dummy, true, err);
    r.error_ = std::max({err[0], err[1], err[2]}) + tail_;
    return r;
}

SusceptibilityPoint SusceptibilityEngine::Row::operator()(double omega_p, Mode mode) const {
    if (!(omega_p > 0.0)) {
        throw DomainError("susceptibility: omega_p > 0 required");
    }
    const double d2 = engine_->kp_.delta * engine_->kp_.delta;
    cdouble s[3];
    engine_->transform3(omega_p, a_.data(), b_.data(), c_.data(), s, false, nullptr);

    SusceptibilityPoint out;
    out.omega_p = omega_p;
    out.k0_plus_0 = d2 * k0p_;
    out.k0_minus_0 = d2 * k0m_;
    out.k0_plus_at_minus_i_omega_p = d2 * s[0];
    // (e^{iwt} - 1) / (2i) = -i (e^{iwt} - 1) / 2
    out.kappa1_plus = d2 * (0.5 * kI) * (s[1] - sum_b_);
    out.kappa1_minus = d2 * (-0.5 * kI) * (s[2] - sum_c_);
    const cdouble denom =
        -kI * omega_p + (mode == Mode::full ? out.k0_plus_at_minus_i_omega_p : out.k0_plus_0);
    out.denominator_modulus = std::abs(denom);
    out.chi = (out.kappa1_minus - out.kappa1_plus * p0_) / (omega_p * denom);
    out.quad_error = d2 * error_;
    return out;
}

} // namespace rabispec::niba
