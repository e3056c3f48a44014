#include "rabispec/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rabispec/errors.hpp"
#include "rabispec/quadrature.hpp"

namespace rabispec::bath {

namespace {

constexpr double kPi = std::numbers::pi;

// ln(sinh x / x) for x >= 0 without overflow or cancellation.
double log_sinhc(double x) {
    if (x < 0.1) {
        const double x2 = x * x;
        return x2 * (1.0 / 6.0 +
                     x2 * (-1.0 / 180.0 + x2 * (1.0 / 2835.0 + x2 * (-1.0 / 37800.0 + x2 / 467775.0))));
    }
    if (x > 30.0) {
        return x - std::numbers::ln2 - std::log(x) + std::log1p(-std::exp(-2.0 * x));
    }
    return std::log(std::sinh(x) / x);
}

// sin(w t / 2) / w, continuous through w = 0.
double half_sinc(double w, double t) {
    const double wt = w * t;
    if (std::abs(wt) < 1e-3) {
        return 0.5 * t * (1.0 - wt * wt / 24.0);
    }
    return std::sin(0.5 * wt) / w;
}

// sin(w t) / w, continuous through w = 0.
double sinc_t(double w, double t) {
    const double wt = w * t;
    if (std::abs(wt) < 1e-3) {
        return t * (1.0 - wt * wt / 6.0);
    }
    return std::sin(wt) / w;
}

void require_time(double t, const char* who) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError(std::string(who) + ": t must be finite and >= 0");
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Spectral densities

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c) {
    if (alpha < 0.0 || !(omega_c > 0.0)) {
        throw DomainError("SpectralDensity::ohmic: alpha >= 0 and omega_c > 0 required");
    }
    SpectralDensity d;
    d.kind_ = Kind::ohmic_exp_cutoff;
    d.alpha_ = alpha;
    d.omega_c_ = omega_c;
    return d;
}

SpectralDensity SpectralDensity::structured(double alpha2, double omega_r, double gamma) {
    if (alpha2 < 0.0 || !(omega_r > 0.0) || gamma < 0.0 || gamma >= 2.0 * omega_r) {
        throw DomainError("SpectralDensity::structured: alpha2 >= 0, omega_r > 0, 0 <= gamma < 2 omega_r required");
    }
    SpectralDensity d;
    d.kind_ = Kind::effective_structured;
    d.alpha_ = alpha2;
    d.omega_r_ = omega_r;
    d.gamma_ = gamma;
    return d;
}

SpectralDensity SpectralDensity::structured(const EffectiveBath& eff) {
    const double omega_r = std::sqrt(eff.omega_bar * eff.omega_bar + 0.25 * eff.gamma * eff.gamma);
    return structured(eff.alpha2, omega_r, eff.gamma);
}

double SpectralDensity::over_w(double w) const {
    if (kind_ == Kind::ohmic_exp_cutoff) {
        return 2.0 * alpha_ * std::exp(-w / omega_c_);
    }
    const double o2 = omega_r_ * omega_r_;
    const double d = o2 - w * w;
    return 2.0 * alpha_ * o2 * o2 / (d * d + gamma_ * gamma_ * w * w);
}

// ---------------------------------------------------------------------------
// Closed forms

QValue q1(double t, double alpha1, double omega_c, double temp1) {
    require_time(t, "q1");
    if (!(temp1 > 0.0) || !(omega_c > 0.0)) {
        throw DomainError("q1: temp1 > 0 and omega_c > 0 required");
    }
    const double wt = omega_c * t;
    const double x = kPi * t * temp1;
    return {alpha1 * std::log1p(wt * wt) + 2.0 * alpha1 * log_sinhc(x),
            2.0 * alpha1 * std::atan(wt)};
}

StructuredQ::StructuredQ(const EffectiveBath& eff, double temp2, double mats_tol)
    : alpha2_(eff.alpha2)
    , gamma_(eff.gamma)
    , omega_bar_(eff.omega_bar)
    , temp_(temp2)
    , tol_(mats_tol) {
    if (!(temp2 > 0.0)) {
        throw DomainError("q2: temp2 > 0 required");
    }
    if (!(mats_tol > 0.0)) {
        throw DomainError("q2: mats_tol > 0 required");
    }
    if (alpha2_ == 0.0 || gamma_ == 0.0) {
        // Without resonator damping the structured bath is absent.
        trivial_ = true;
        return;
    }
    omega2_ = omega_bar_ * omega_bar_ + 0.25 * gamma_ * gamma_;
    if (!(gamma_ < 2.0 * std::sqrt(omega2_))) {
        throw DomainError("q2: gamma < 2 Omega required");
    }

    n_ = (0.5 * gamma_ * gamma_ - omega2_) / (gamma_ * omega_bar_);
    const double a = omega_bar_ / temp2;
    const double b = 0.5 * gamma_ / temp2;
    const double th = std::tanh(a);
    const double sech = a > 700.0 ? 0.0 : 1.0 / std::cosh(a);
    const double denom = 1.0 - std::cos(b) * sech;
    l_ = kPi * alpha2_ * (n_ * th + std::sin(b) * sech) / denom;
    z_ = kPi * alpha2_ * (th - n_ * std::sin(b) * sech) / denom;
    x_ = 2.0 * kPi * alpha2_ * temp2;

    nu1_ = 2.0 * kPi * temp2;
    prefactor_ = 4.0 * kPi * alpha2_ * omega2_ * omega2_ * temp2;
    const double lin = 2.0 * omega2_ - gamma_ * gamma_;
    rho_ = lin >= 0.0 ? 1.0 : 1.0 - lin * lin / (4.0 * omega2_ * omega2_);

    // sum_n a_n with sum_{n>N} a_n <= 1 / (4 rho nu1^5 N^4)
    const double nu1_5 = std::pow(nu1_, 5);
    quad::CompensatedSum<double> s;
    int n = 0;
    double tail = 0.0;
    do {
        ++n;
        s.add(mats_term(n));
        tail = 1.0 / (4.0 * rho_ * nu1_5 * std::pow(static_cast<double>(n), 4));
    } while (tail > 1e-3 * mats_tol * s.value() && n < 10'000'000);
    s0_ = s.value();
    s0_terms_ = n;
    s0_tail_ = tail;
}

double StructuredQ::mats_term(int n) const {
    const double nu = nu1_ * n;
    const double nu2 = nu * nu;
    const double p = omega2_ + nu2;
    return 1.0 / ((p * p - gamma_ * gamma_ * nu2) * nu);
}

Q2Value StructuredQ::matsubara(double t) const {
    Q2Value out;
    if (t == 0.0) {
        return out;
    }
    constexpr int kMaxTerms = 10'000'000;
    if (nu1_ * t >= 1.0) {
        // sum_n a_n (1 - e^{-nu_n t}) = S0 - sum_n a_n e^{-nu_n t}; the second
        // series decreases at least geometrically with ratio e^{-nu1 t}.
        const double ratio = std::exp(-nu1_ * t);
        quad::CompensatedSum<double> e;
        int n = 0;
        double tail = 0.0;
        double value = 0.0;
        do {
            ++n;
            e.add(mats_term(n) * std::exp(-nu1_ * n * t));
            tail = mats_term(n + 1) * std::exp(-nu1_ * (n + 1) * t) / (1.0 - ratio);
            value = s0_ - e.value();
        } while (tail > tol_ * value && n < kMaxTerms);
        if (tail > tol_ * value) {
            throw ToleranceError("q2: Matsubara series did not converge", tail / value);
        }
        out.re = prefactor_ * value;
        out.terms = n + s0_terms_;
        out.tail = prefactor_ * (tail + s0_tail_);
        return out;
    }
    // Direct summation; a_n (1 - e^{-nu_n t}) <= a_n min(1, nu_n t) gives the
    // algebraic tail bound min(t / (3 rho nu1^4 N^3), 1 / (4 rho nu1^5 N^4)).
    quad::CompensatedSum<double> s;
    const double nu1_4 = std::pow(nu1_, 4);
    int n = 0;
    double tail = 0.0;
    double last = 0.0;
    do {
        ++n;
        last = mats_term(n) * -std::expm1(-nu1_ * n * t);
        s.add(last);
        const double nn = static_cast<double>(n);
        tail = std::min(t / (3.0 * rho_ * nu1_4 * nn * nn * nn),
                        1.0 / (4.0 * rho_ * nu1_4 * nu1_ * nn * nn * nn * nn));
    } while ((tail > tol_ * s.value() || last > tol_ * s.value()) && n < kMaxTerms);
    if (tail > tol_ * s.value()) {
        throw ToleranceError("q2: Matsubara series did not converge", tail / s.value());
    }
    out.re = prefactor_ * s.value();
    out.terms = n;
    out.tail = prefactor_ * tail;
    return out;
}

Q2Value StructuredQ::operator()(double t) const {
    require_time(t, "q2");
    if (trivial_ || t == 0.0) {
        return {};
    }
    Q2Value out = matsubara(t);
    const double damp = std::exp(-0.5 * gamma_ * t);
    const double c = std::cos(omega_bar_ * t);
    const double s = std::sin(omega_bar_ * t);
    out.re += x_ * t + l_ * (damp * c - 1.0) - z_ * damp * s;
    out.im = kPi * alpha2_ - damp * kPi * alpha2_ * (c + n_ * s);
    return out;
}

Q2Value q2(double t, const EffectiveBath& eff, double temp2, double mats_tol) {
    return StructuredQ(eff, temp2, mats_tol)(t);
}

// ---------------------------------------------------------------------------
// Quadrature oracle

namespace {

std::vector<double> density_breaks(const SpectralDensity& d, double t, double w_max) {
    std::vector<double> b{0.0, w_max};
    if (t > 0.0) {
        b.push_back(1.0 / t);
    }
    if (d.kind() == SpectralDensity::Kind::ohmic_exp_cutoff) {
        b.push_back(d.omega_c());
    } else {
        const double o = d.omega_r();
        const double g = d.gamma();
        for (double f : {-4.0, -1.0, -0.25, 0.0, 0.25, 1.0, 4.0}) {
            b.push_back(o + f * g);
        }
        b.push_back(2.0 * o);
    }
    std::sort(b.begin(), b.end());
    std::vector<double> out;
    for (double x : b) {
        if (x >= 0.0 && x <= w_max && (out.empty() || x > out.back() * (1.0 + 1e-12) + 1e-300)) {
            out.push_back(x);
        }
    }
    return out;
}

// Upper bound of int_W^inf G(w)/w^2 * weight, weight <= `scale` / w^0.
double structured_tail(const SpectralDensity& d, double w, double power) {
    // For w >= 2 Omega the denominator exceeds (9/16) w^4, so
    // G / w^2 <= (32/9) alpha Omega^4 / w^5.
    const double o4 = std::pow(d.omega_r(), 4);
    return (32.0 / 9.0) * d.alpha() * o4 / ((power - 1.0) * std::pow(w, power - 1.0));
}

template <typename F>
double integrate_component(F&& f, const std::vector<double>& breaks, double panel, double rel_tol,
                           double extra_abs, double& err) {
    const auto rough = quad::integrate_breaks(f, breaks, 1e300, panel, 0);
    const double abs_tol = std::max(0.1 * rel_tol * std::abs(rough.value), 1e-300);
    const auto fine = quad::integrate_breaks(f, breaks, abs_tol, panel, 40);
    err = fine.error + extra_abs;
    return fine.value;
}

} // namespace

QValue q_numeric(double t, const SpectralDensity& density, double temp, double rel_tol) {
    require_time(t, "q_numeric");
    if (!(temp > 0.0)) {
        throw DomainError("q_numeric: temp > 0 required");
    }
    if (t == 0.0 || density.alpha() == 0.0) {
        return {};
    }
    const bool ohmic = density.kind() == SpectralDensity::Kind::ohmic_exp_cutoff;
    // Integrate up to w_max and bound the remainder analytically.
    double w_max = 0.0;
    double tail_re = 0.0;
    double tail_im = 0.0;
    if (ohmic) {
        w_max = 80.0 * density.omega_c();
        const double bound = 4.0 * density.alpha() * density.omega_c() * std::exp(-80.0) / w_max /
                             std::tanh(0.5 * w_max / temp);
        tail_re = bound;
        tail_im = bound;
    } else {
        w_max = 2.0 * density.omega_r();
        do {
            w_max *= 2.0;
            tail_re = 2.0 * structured_tail(density, w_max, 5.0) / std::tanh(0.5 * w_max / temp);
            tail_im = structured_tail(density, w_max, 5.0);
        } while (tail_re > 1e-4 * rel_tol * density.alpha() * std::min(1.0, t * t) && w_max < 1e7);
    }
    const auto breaks = density_breaks(density, t, w_max);
    const double panel = 2.0 * kPi / (8.0 * t);

    auto re_f = [&](double w) {
        const double hs = half_sinc(w, t);
        return density.over_w(w) * 2.0 * hs * std::sin(0.5 * w * t) / std::tanh(0.5 * w / temp);
    };
    auto im_f = [&](double w) { return density.over_w(w) * sinc_t(w, t); };

    double err_re = 0.0;
    double err_im = 0.0;
    QValue out;
    out.re = integrate_component(re_f, breaks, panel, rel_tol, tail_re, err_re);
    out.im = integrate_component(im_f, breaks, panel, rel_tol, tail_im, err_im);
    const double achieved = std::max(err_re / std::abs(out.re), err_im / std::abs(out.im));
    if (!(achieved <= rel_tol)) {
        throw ToleranceError("q_numeric: tolerance not met", achieved);
    }
    return out;
}

double spectral_weight(const SpectralDensity& density, double rel_tol) {
    if (density.alpha() == 0.0) {
        return 0.0;
    }
    auto f = [&](double w) { return density(w); };
    std::vector<double> breaks;
    double tail = 0.0;
    if (density.kind() == SpectralDensity::Kind::ohmic_exp_cutoff) {
        const double wc = density.omega_c();
        breaks = {0.0, wc, 10.0 * wc, 80.0 * wc};
    } else {
        const double o = density.omega_r();
        breaks = density_breaks(density, 0.0, 1e4 * o);
        for (double f10 : {10.0, 100.0, 1000.0}) {
            breaks.push_back(f10 * o);
        }
        std::sort(breaks.begin(), breaks.end());
        // G(w) -> 2 alpha Omega^4 / w^3 at large w
        const double w = breaks.back();
        tail = density.alpha() * std::pow(o, 4) / (w * w);
    }
    double err = 0.0;
    const double value = integrate_component(f, breaks, 1e300, rel_tol, 0.0, err);
    if (!(err <= rel_tol * std::abs(value + tail))) {
        throw ToleranceError("spectral_weight: tolerance not met", err / std::abs(value + tail));
    }
    return value + tail;
}

// ---------------------------------------------------------------------------
// Tabulation

CorrelationTable::CorrelationTable(std::vector<double> tau, std::vector<double> re,
                                   std::vector<double> im, double fine_step, double t_split,
                                   double coarse_step, double decay_rate, double omega_c,
                                   double omega_bar)
    : tau_(std::move(tau))
    , re_(std::move(re))
    , im_(std::move(im))
    , fine_step_(fine_step)
    , t_split_(t_split)
    , coarse_step_(coarse_step)
    , n_fine_(static_cast<std::size_t>(std::llround(t_split / fine_step)))
    , decay_rate_(decay_rate)
    , omega_c_(omega_c)
    , omega_bar_(omega_bar) {
    if (tau_.size() < 4 || re_.size() != tau_.size() || im_.size() != tau_.size()) {
        throw DomainError("CorrelationTable: at least 4 consistent samples required");
    }
}

std::size_t CorrelationTable::stencil_start(double tau) const {
    std::size_t k = 0;
    if (tau < t_split_) {
        k = static_cast<std::size_t>(tau / fine_step_);
    } else {
        k = n_fine_ + static_cast<std::size_t>((tau - t_split_) / coarse_step_);
    }
    k = std::min(k, tau_.size() - 2);
    // The floor index may be off by one at segment edges; fix it locally.
    while (k > 0 && tau_[k] > tau) {
        --k;
    }
    while (k + 1 < tau_.size() - 1 && tau_[k + 1] <= tau) {
        ++k;
    }
    const std::size_t start = k == 0 ? 0 : k - 1;
    return std::min(start, tau_.size() - 4);
}

QValue CorrelationTable::operator()(double tau) const {
    if (!(tau >= 0.0) || tau > tau_.back() * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "CorrelationTable: tau=" << tau << " outside [0, " << tau_.back() << "]";
        throw DomainError(os.str());
    }
    const std::size_t s = stencil_start(tau);
    const double* x = &tau_[s];
    double re = 0.0;
    double im = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = 1.0;
        for (int j = 0; j < 4; ++j) {
            if (j != i) {
                w *= (tau - x[j]) / (x[i] - x[j]);
            }
        }
        re += w * re_[s + i];
        im += w * im_[s + i];
    }
    return {re, im};
}

CorrelationTable tabulate_q_total(double g, double omega_r, const BathSpec& baths,
                                  const TableOptions& options) {
    baths.validate();
    if (!(options.coarse_step > 0.0) || !(options.tau_cap > 0.0)) {
        throw DomainError("tabulate_q_total: coarse_step and tau_cap must be positive");
    }
    const EffectiveBath eff = effective_bath(g, omega_r, baths.kappa);
    const StructuredQ q2_eval(eff, baths.temp2, options.mats_tol);
    const bool structured = eff.alpha2 > 0.0 && eff.gamma > 0.0;
    const double decay = 2.0 * kPi * baths.alpha1 * baths.temp1 + (structured ? q2_eval.slope() : 0.0);

    auto q_total = [&](double t) {
        const QValue a = q1(t, baths.alpha1, baths.omega_c, baths.temp1);
        const Q2Value b = q2_eval(t);
        return QValue{a.re + b.re, a.im + b.im};
    };

    double tau_max = options.tau_max;
    if (tau_max <= 0.0) {
        if (!(decay > 0.0)) {
            throw NumericalError("tabulate_q_total: correlation function does not grow (no dissipation); "
                                 "kernels never decay");
        }
        tau_max = std::min(std::max(50.0, 20.0 / decay), options.tau_cap);
        const double target = -std::log(options.cutoff);
        while (q_total(tau_max).re < target) {
            if (tau_max >= options.tau_cap) {
                std::ostringstream os;
                os << "tabulate_q_total: decay rate " << decay << " too slow; e^{-Q'} stays above "
                   << options.cutoff << " up to the cap tau=" << options.tau_cap;
                throw NumericalError(os.str());
            }
            tau_max = std::min(1.25 * tau_max, options.tau_cap);
        }
    }

    const double fine_target = std::min(1e-3, 0.01 / baths.omega_c);
    const double osc = structured ? eff.omega_bar : omega_r;
    const double t_split = std::min(std::max(2.0 * kPi / osc, 10.0 / baths.omega_c), tau_max);
    const auto n_fine = static_cast<std::size_t>(std::ceil(t_split / fine_target));
    const double fine = t_split / static_cast<double>(n_fine);

    std::vector<double> tau;
    tau.reserve(n_fine + static_cast<std::size_t>((tau_max - t_split) / options.coarse_step) + 2);
    for (std::size_t i = 0; i <= n_fine; ++i) {
        tau.push_back(fine * static_cast<double>(i));
    }
    tau.back() = t_split;
    const auto n_coarse =
        static_cast<std::size_t>(std::ceil((tau_max - t_split) / options.coarse_step - 1e-9));
    for (std::size_t i = 1; i <= n_coarse; ++i) {
        tau.push_back(t_split + options.coarse_step * static_cast<double>(i));
    }
    // End exactly at tau_max; a sliver of a last step is merged into the one before.
    if (n_coarse > 0) {
        tau.back() = tau_max;
        if (n_coarse > 1 && tau_max - tau[tau.size() - 2] < 0.5 * options.coarse_step) {
            tau.erase(tau.end() - 2);
        }
    }
    while (tau.size() < 4) {
        tau.push_back(tau.back() + fine);
    }

    std::vector<double> re(tau.size());
    std::vector<double> im(tau.size());
    for (std::size_t i = 0; i < tau.size(); ++i) {
        const QValue q = q_total(tau[i]);
        re[i] = q.re;
        im[i] = q.im;
    }
    return CorrelationTable(std::move(tau), std::move(re), std::move(im), fine, t_split,
                            options.coarse_step, decay, baths.omega_c, eff.omega_bar);
}

} // namespace rabispec::bath
