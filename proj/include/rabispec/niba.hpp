// niba.hpp: Drive-averaged NIBA kernels, their Laplace transforms and the
// linear susceptibility chi(omega_p)
//
// Kernels: h+(t) = Delta^2 e^{-Q'(t)} cos Q''(t) J0[2 (eps_d/omega_d) sin(omega_d t / 2)]
//          h-(t) = same with sin Q''(t)
// Transforms (c+ = cos, c- = sin):
//   k0^{+/-}(lambda) = int_0^inf e^{-lambda t} h^{+/-}(t) c^{+/-}(eps0 t) dt
//   kappa1^{+/-}     = -/+ int_0^inf (e^{i w t} - 1)/(2i) h^{+/-}(t) c^{-/+}(eps0 t) dt
// kappa1 is the first probe harmonic with the probe amplitude divided out, so
// chi never needs eps_p:
//   chi = [kappa1^- - kappa1^+ p0] / (w (-i w + k0^+(-i w))),  p0 = k0^-(0) / k0^+(0).

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "rabispec/bath.hpp"
#include "rabispec/params.hpp"

namespace rabispec::niba {

using cdouble = std::complex<double>;

/// The subset of the model entering the kernels. The probe amplitude is
/// deliberately absent.
struct KernelParams {
    double delta{1.0};
    double eps0{0.0};
    double eps_d{0.0};
    double omega_d{2.7};
    double omega_r{1.5};
};

KernelParams kernel_params(const ModelParams& params);

enum class Sign { plus, minus };
enum class Mode { full, markov };

struct KernelPair {
    double plus{0.0};
    double minus{0.0};
};

/// h^{+/-}_d(tau) including the drive factor (which is 1 for eps_d = 0).
KernelPair kernel_h(double tau, const KernelParams& kp, const bath::CorrelationTable& table);

/// Static kernels Delta^2 e^{-Q'} {cos, sin} Q'' without any drive factor.
KernelPair kernel_h_undriven(double tau, double delta, const bath::CorrelationTable& table);

struct QuadOptions {
    double rel_tol{1e-10};
    int max_depth{16};
};

struct Integral {
    cdouble value{};
    double error{0.0}; // quadrature estimate plus truncation bound at tau_max
};

/// Adaptive k0^{+/-}(lambda), Re lambda >= 0.
Integral k_hat_0(cdouble lambda, Sign sign, const KernelParams& kp,
                 const bath::CorrelationTable& table, const QuadOptions& opts = {});

/// Adaptive kappa1^{+/-}(omega_p).
Integral kappa_hat_1(Sign sign, double omega_p, const KernelParams& kp,
                     const bath::CorrelationTable& table, const QuadOptions& opts = {});

struct Population {
    double p0{0.0};
    double imag_residue{0.0};
    double error{0.0};
};

/// Stationary population difference without probe.
Population steady_population(const KernelParams& kp, const bath::CorrelationTable& table,
                             const QuadOptions& opts = {});

struct SusceptibilityPoint {
    double omega_p{0.0};
    cdouble chi{};
    cdouble k0_plus_at_minus_i_omega_p{};
    cdouble k0_plus_0{};
    cdouble k0_minus_0{};
    cdouble kappa1_plus{};
    cdouble kappa1_minus{};
    double denominator_modulus{0.0}; // |-i w + k0^+| (or k0^+(0) in markov mode)
    double quad_error{0.0};
};

/// chi(omega_p) from the adaptive transforms.
SusceptibilityPoint susceptibility(double omega_p, const KernelParams& kp,
                                   const bath::CorrelationTable& table, Mode mode,
                                   const QuadOptions& opts = {});

/// Highest frequency an integrand can carry on a grid whose bias satisfies
/// |eps0| <= max_abs_eps0 and probe omega_p <= max_omega_p.
double grid_omega_max(double max_abs_eps0, double max_omega_p, const KernelParams& kp);

/// Fast evaluation of chi over many (eps0, omega_p) points sharing one kernel.
///
/// The unit-Delta kernels are sampled once on fixed Gauss-Kronrod panels no
/// longer than 1/8 of the shortest period at omega_max. A Row fixes eps0;
/// evaluating one omega_p then costs a few real-complex products per node.
class SusceptibilityEngine {
public:
    enum class KernelPath { driven, undriven };

    SusceptibilityEngine(const KernelParams& kp, const bath::CorrelationTable& table,
                         double omega_max, KernelPath path = KernelPath::driven);

    class Row {
    public:
        SusceptibilityPoint operator()(double omega_p, Mode mode) const;
        double eps0() const { return eps0_; }
        double p0() const { return p0_; }

    private:
        friend class SusceptibilityEngine;
        Row() = default;

        const SusceptibilityEngine* engine_{nullptr};
        double eps0_{0.0};
        std::vector<double> a_; // w h+ cos(eps0 t)
        std::vector<double> b_; // w h+ sin(eps0 t)
        std::vector<double> c_; // w h- cos(eps0 t)
        double k0p_{0.0};       // sum a
        double k0m_{0.0};       // sum w h- sin(eps0 t)
        double sum_b_{0.0};
        double sum_c_{0.0};
        double p0_{0.0};
        double error_{0.0};     // unit-Delta error estimate of any transform
    };

    /// Precomputes the eps0-dependent arrays. Throws NumericalError when
    /// k0^+(0) is degenerate.
    Row row(double eps0) const;

    double delta() const { return kp_.delta; }
    double omega_max() const { return omega_max_; }
    std::size_t node_count() const { return tau_.size(); }

private:
    struct Segment {
        double start;
        double width;
        std::size_t panels;
        std::size_t offset;
    };

    // sum_k e^{i w a_k} sum_i e^{i w (t_ki - a_k)} f_ki for three arrays at once.
    void transform3(double w, const double* f0, const double* f1, const double* f2,
                    cdouble out[3], bool error_weights, double err[3]) const;

    KernelParams kp_;
    double omega_max_;
    double tail_;               // unit-Delta truncation bound
    std::vector<Segment> segments_;
    std::vector<double> tau_;
    std::vector<double> hp_;    // weighted unit kernels
    std::vector<double> hm_;
};

} // namespace rabispec::niba
