// bath.hpp: Spectral densities and bath correlation functions Q(t) = Q'(t) + i Q''(t)
//
// Q(t) = int_0^inf dw G(w)/w^2 [coth(w/2T)(1 - cos wt) + i sin wt]. Two baths
// act on the qubit: an Ohmic bath with exponential cutoff (closed form in the
// scaling limit) and the structured bath left by the damped resonator (closed
// form plus a Matsubara series). CorrelationTable samples their sum once so
// the kernel integrals can interpolate it cheaply.

#pragma once

#include <cstddef>
#include <vector>

#include "rabispec/params.hpp"

namespace rabispec::bath {

/// G(w) for either supported bath.
class SpectralDensity {
public:
    enum class Kind { ohmic_exp_cutoff, effective_structured };

    /// G1(w) = 2 alpha w exp(-w / omega_c).
    static SpectralDensity ohmic(double alpha, double omega_c);
    /// G2(w) = 2 alpha2 w Omega^4 / [(Omega^2 - w^2)^2 + (gamma w)^2].
    static SpectralDensity structured(double alpha2, double omega_r, double gamma);
    static SpectralDensity structured(const EffectiveBath& eff);

    Kind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double omega_c() const { return omega_c_; }
    double omega_r() const { return omega_r_; }
    double gamma() const { return gamma_; }

    double operator()(double w) const { return w * over_w(w); }
    /// G(w) / w, finite at w = 0.
    double over_w(double w) const;

private:
    Kind kind_{Kind::ohmic_exp_cutoff};
    double alpha_{0.0};
    double omega_c_{0.0};
    double omega_r_{0.0};
    double gamma_{0.0};
};

struct QValue {
    double re{0.0};
    double im{0.0};
};

/// Scaling-limit Ohmic correlation function at inverse temperature 1/temp1.
QValue q1(double t, double alpha1, double omega_c, double temp1);

struct Q2Value {
    double re{0.0};
    double im{0.0};
    int terms{0};        // Matsubara terms summed
    double tail{0.0};    // bound on the neglected part of the Matsubara series
};

/// Closed-form correlation function of the structured bath. Construction
/// precomputes the coefficients and the t -> infinity Matsubara sum so that
/// repeated evaluation at many t is cheap.
class StructuredQ {
public:
    StructuredQ(const EffectiveBath& eff, double temp2, double mats_tol = 1e-10);

    Q2Value operator()(double t) const;

    double coefficient_n() const { return n_; }
    double coefficient_l() const { return l_; }
    double coefficient_z() const { return z_; }
    /// Asymptotic slope of Q2': 2 pi alpha2 T2.
    double slope() const { return x_; }

private:
    double mats_term(int n) const; // 1 / (D_n nu_n)
    Q2Value matsubara(double t) const;

    bool trivial_{false};
    double alpha2_{0.0};
    double gamma_{0.0};
    double omega_bar_{0.0};
    double omega2_{0.0};
    double temp_{0.0};
    double tol_{0.0};
    double nu1_{0.0};
    double rho_{1.0};     // lower bound of D_n / nu_n^4 over all n
    double prefactor_{0.0};
    double x_{0.0};
    double n_{0.0};
    double l_{0.0};
    double z_{0.0};
    double s0_{0.0};      // sum_n 1 / (D_n nu_n)
    int s0_terms_{0};
    double s0_tail_{0.0};
};

/// Convenience wrapper around StructuredQ for a single time.
Q2Value q2(double t, const EffectiveBath& eff, double temp2, double mats_tol = 1e-10);

/// Direct adaptive quadrature of the defining integral. Throws ToleranceError
/// when the estimated relative error exceeds rel_tol.
QValue q_numeric(double t, const SpectralDensity& density, double temp, double rel_tol = 1e-10);

/// int_0^inf G(w) dw by quadrature (analytic large-w tail for G2).
double spectral_weight(const SpectralDensity& density, double rel_tol = 1e-10);

/// Options of the correlation-function tabulation.
struct TableOptions {
    double tau_max{0.0};     // 0 selects the automatic rule
    double tau_cap{1e4};     // largest admissible tau_max
    double coarse_step{5e-3};
    double mats_tol{1e-10};
    double cutoff{1e-8};     // e^{-Q'(tau_max)} must fall below this
};

/// Sampled Q(t) = Q1(t) + Q2(t) on [0, tau_max] with local cubic interpolation.
/// The grid has two uniform segments: a fine one up to t_split resolving the
/// cutoff and resonator oscillation scales, then a coarse one.
class CorrelationTable {
public:
    CorrelationTable(std::vector<double> tau, std::vector<double> re, std::vector<double> im,
                     double fine_step, double t_split, double coarse_step, double decay_rate,
                     double omega_c, double omega_bar);

    QValue operator()(double tau) const;

    const std::vector<double>& tau_grid() const { return tau_; }
    const std::vector<double>& q_re() const { return re_; }
    const std::vector<double>& q_im() const { return im_; }
    double tau_max() const { return tau_.back(); }
    double t_split() const { return t_split_; }
    double fine_step() const { return fine_step_; }
    double decay_rate() const { return decay_rate_; }
    /// Characteristic frequencies used to size quadrature panels.
    double omega_c() const { return omega_c_; }
    double omega_bar() const { return omega_bar_; }

private:
    std::size_t stencil_start(double tau) const;

    std::vector<double> tau_;
    std::vector<double> re_;
    std::vector<double> im_;
    double fine_step_;
    double t_split_;
    double coarse_step_;
    std::size_t n_fine_;
    double decay_rate_;
    double omega_c_;
    double omega_bar_;
};

/// Tabulates Q1 + Q2 for coupling g and resonator frequency omega_r. Throws
/// NumericalError when the required tau_max exceeds options.tau_cap (no
/// dissipation, or dissipation too weak to damp the kernels).
CorrelationTable tabulate_q_total(double g, double omega_r, const BathSpec& baths,
                                  const TableOptions& options = {});

} // namespace rabispec::bath
