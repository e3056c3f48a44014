// specfun.hpp: Laguerre and Bessel functions and the dressed tunneling elements
//
// All functions are pure and thread-safe.

#pragma once

namespace rabispec::specfun {

/// Arguments of the dressing factors.
struct DressingArgs {
    double alpha_tilde{0.0}; // (2 g / Omega)^2
    double drive_ratio{0.0}; // eps_d / omega_d
};

/// Generalized Laguerre polynomial L^k_j(x) by the three-term recurrence.
double laguerre(int k, int j, double x);

/// Bessel function of the first kind J_n(x) for integer order.
/// Validated for |x| <= 50 and |n| <= 60; outside that range a DomainError
/// is thrown rather than returning an unverified value.
double bessel_j(int n, double x);

/// D^k_j(a) = a^{k/2} sqrt(j!/(j+k)!) L^k_j(a) exp(-a/2); the factorial ratio
/// is evaluated through lgamma so that j + k may run to several hundred.
double dressing_factor(int k, int j, double alpha_tilde);

/// Delta^{j'}_j = Delta sgn(j'-j)^{|j'-j|} D^{|j'-j|}_{min(j,j')}(alpha_tilde).
double dressed_delta_static(double delta, int j, int j_prime, double alpha_tilde);

/// Delta^{n',j'}_{n,j} = J_{n'-n}(eps_d/omega_d) Delta^{j'}_j.
double dressed_delta_driven(double delta, int n, int n_prime, int j, int j_prime,
                            const DressingArgs& args);

} // namespace rabispec::specfun
