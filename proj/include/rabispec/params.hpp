// params.hpp: Physical parameters, unit conventions and derived quantities
//
// Units: hbar = k_B = 1 and every frequency is measured in units of the bare
// qubit splitting delta (delta = 1 by default). Temperatures are entered as
// k_B T / (hbar delta), i.e. as angular frequencies.

#pragma once

#include <string>
#include <vector>

namespace rabispec {

/// Qubit, resonator, drive and probe parameters of the driven Rabi model.
struct ModelParams {
    double delta{1.0};    // qubit tunneling splitting
    double eps0{0.0};     // static bias
    double omega_r{1.5};  // resonator frequency
    double g{0.0};        // qubit-resonator coupling
    double eps_d{0.0};    // drive amplitude
    double omega_d{2.7};  // drive frequency
    double eps_p{0.01};   // probe amplitude (linear response only)
    double omega_p{0.55}; // probe frequency

    /// Throws DomainError when an invariant is violated.
    void validate() const;

    /// Non-fatal diagnostics, e.g. a probe too strong for linear response.
    std::vector<std::string> warnings() const;
};

/// Dissipation parameters of the Ohmic qubit bath (1) and the resonator bath.
struct BathSpec {
    double alpha1{0.1};  // Ohmic coupling of the qubit bath
    double omega_c{10.0}; // exponential cutoff of the qubit bath
    double kappa{0.05};  // Ohmic coupling of the resonator bath
    double temp1{0.1};   // temperature of the qubit bath
    double temp2{0.1};   // temperature of the resonator bath

    void validate() const;
};

/// Structured bath seen by the qubit once the damped resonator is traced out.
struct EffectiveBath {
    double alpha2{0.0};    // 8 kappa g^2 / Omega^2
    double gamma{0.0};     // peak width 2 pi kappa Omega
    double omega_bar{0.0}; // sqrt(Omega^2 - gamma^2 / 4)
};

/// Strong-dissipation bath preset (alpha1 = 0.1, kappa = 0.05), the default
/// for spectra that do not set the bath couplings explicitly.
BathSpec strong_dissipation_preset();

/// Effective structured bath for coupling g, resonator frequency omega_r and
/// resonator damping kappa. Throws DomainError for an overdamped resonator
/// (kappa >= 1/pi) or omega_r <= 0.
EffectiveBath effective_bath(double g, double omega_r, double kappa);

/// Delta_T = Delta_r (2 pi T / Delta_r)^alpha1 with
/// Delta_r = Delta (Delta / omega_c)^(alpha1 / (1 - alpha1)).
double renormalized_delta(double delta, double alpha1, double omega_c, double temp1);

/// g / Omega for a galvanically coupled flux qubit, SI inputs:
/// persistent current [A], coupling and resonator inductances [H],
/// resonator angular frequency [rad/s].
double circuit_coupling_estimate(double ip, double lc, double lr, double omega_r);

/// alpha~ = (2 g / Omega)^2, the squared displacement of the resonator.
inline double alpha_tilde(double g, double omega_r) {
    const double r = 2.0 * g / omega_r;
    return r * r;
}

} // namespace rabispec
