#include "rabispec/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rabispec/errors.hpp"

namespace rabispec {

namespace {

constexpr double kHbar = 1.054571817e-34; // J s

void require(bool ok, const std::string& what) {
    if (!ok) {
        throw DomainError(what);
    }
}

} // namespace

void ModelParams::validate() const {
    require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
    require(std::isfinite(omega_r) && omega_r > 0.0, "omega_r must be > 0");
    require(std::isfinite(g) && g >= 0.0, "g must be >= 0");
    require(std::isfinite(eps0), "eps0 must be finite");
    require(std::isfinite(eps_d), "eps_d must be finite");
    require(eps_d == 0.0 || omega_d > 0.0, "omega_d must be > 0 when eps_d != 0");
    require(std::isfinite(eps_p), "eps_p must be finite");
    require(eps_p == 0.0 || omega_p > 0.0, "omega_p must be > 0 when eps_p != 0");
}

std::vector<std::string> ModelParams::warnings() const {
    std::vector<std::string> out;
    if (omega_p > 0.0 && std::abs(eps_p) / omega_p > 0.1) {
        std::ostringstream os;
        os << "eps_p/omega_p = " << std::abs(eps_p) / omega_p
           << " > 0.1: linear response to the probe is questionable";
        out.push_back(os.str());
    }
    return out;
}

void BathSpec::validate() const {
    require(std::isfinite(alpha1) && alpha1 >= 0.0 && alpha1 < 1.0, "alpha1 must lie in [0, 1)");
    require(std::isfinite(omega_c) && omega_c > 0.0, "omega_c must be > 0");
    require(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    require(kappa < 1.0 / std::numbers::pi, "kappa must be < 1/pi (underdamped resonator)");
    require(std::isfinite(temp1) && temp1 > 0.0, "temp1 must be > 0");
    require(std::isfinite(temp2) && temp2 > 0.0, "temp2 must be > 0");
}

BathSpec strong_dissipation_preset() {
    BathSpec b;
    b.alpha1 = 0.1;
    b.omega_c = 10.0;
    b.kappa = 0.05;
    b.temp1 = 0.1;
    b.temp2 = 0.1;
    return b;
}

EffectiveBath effective_bath(double g, double omega_r, double kappa) {
    require(omega_r > 0.0, "omega_r must be > 0");
    require(kappa >= 0.0, "kappa must be >= 0");
    const double gamma = 2.0 * std::numbers::pi * kappa * omega_r;
    if (gamma >= 2.0 * omega_r) {
        throw DomainError("overdamped resonator: 2 pi kappa >= 2 makes omega_bar imaginary");
    }
    EffectiveBath eb;
    eb.alpha2 = 8.0 * kappa * g * g / (omega_r * omega_r);
    eb.gamma = gamma;
    eb.omega_bar = std::sqrt(omega_r * omega_r - 0.25 * gamma * gamma);
    return eb;
}

double renormalized_delta(double delta, double alpha1, double omega_c, double temp1) {
    require(delta > 0.0, "delta must be > 0");
    require(alpha1 >= 0.0, "alpha1 must be >= 0");
    if (alpha1 >= 1.0) {
        throw DomainError("renormalized_delta: alpha1 >= 1 (localized phase)");
    }
    require(temp1 > 0.0, "temp1 must be > 0");
    if (alpha1 == 0.0) {
        return delta;
    }
    require(omega_c > delta, "renormalized_delta requires omega_c > delta");
    const double delta_r = delta * std::pow(delta / omega_c, alpha1 / (1.0 - alpha1));
    return delta_r * std::pow(2.0 * std::numbers::pi * temp1 / delta_r, alpha1);
}

double circuit_coupling_estimate(double ip, double lc, double lr, double omega_r) {
    require(ip >= 0.0 && lc > 0.0 && lr > 0.0 && omega_r > 0.0,
            "circuit_coupling_estimate: inputs must be positive");
    return lc * ip / std::sqrt(2.0 * kHbar * omega_r * (lc + lr));
}

} // namespace rabispec
