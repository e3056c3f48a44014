#include "rabispec/vanvleck.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "rabispec/errors.hpp"
#include "rabispec/specfun.hpp"

namespace rabispec::vanvleck {

namespace {

struct DoubletStates {
    int j_down;
    int j_up;
};

DoubletStates doublet_states(int j, int l) {
    if (j < 0) {
        throw DomainError("vanvleck: oscillator index j must be >= 0");
    }
    return {j + std::max(0, -l), j + std::max(0, l)};
}

[[noreturn]] void throw_resonance(double eps0, int p, int k, double denom) {
    std::ostringstream os;
    os << "near resonance at eps0=" << eps0 << " (p=" << p << ", k=" << k
       << ", denominator=" << denom << ")";
    throw NearResonanceError(os.str());
}

} // namespace

void CorrectionPolicy::validate() const {
    if (k_max < 1 || p_max < 1 || !(resonance_guard > 0.0)) {
        throw DomainError("CorrectionPolicy: k_max, p_max >= 1 and resonance_guard > 0 required");
    }
}

double delta0_energies(double eps0, double omega_r, double g, int j, Branch branch) {
    if (j < 0) {
        throw DomainError("delta0_energies: j must be >= 0");
    }
    const double s = branch == Branch::lower ? -1.0 : 1.0;
    return s * 0.5 * eps0 + j * omega_r - g * g / omega_r;
}

Correction diagonal_correction_static(Spin spin, int j, int l, double eps0,
                                      const ModelParams& params, const CorrectionPolicy& policy) {
    policy.validate();
    if (j < 0) {
        throw DomainError("diagonal_correction_static: j must be >= 0");
    }
    const double at = alpha_tilde(params.g, params.omega_r);
    const double sign = spin == Spin::down ? -1.0 : 1.0;
    const int excluded = spin == Spin::down ? l : -l;

    Correction c;
    double last = 0.0;
    for (int k = -j; k <= policy.k_max; ++k) {
        if (k == excluded) {
            continue;
        }
        const double d = specfun::dressed_delta_static(params.delta, j, j + k, at);
        const double num = d * d;
        if (num == 0.0) {
            last = 0.0;
            continue;
        }
        const double denom = eps0 + sign * k * params.omega_r;
        if (std::abs(denom) < policy.resonance_guard) {
            throw_resonance(eps0, 0, k, denom);
        }
        last = num / denom;
        c.value += last;
    }
    c.remainder = std::abs(last);
    return c;
}

double static_splitting(int j, int l, double eps0, const ModelParams& params,
                        const CorrectionPolicy& policy) {
    const auto st = doublet_states(j, l);
    double detuning = eps0 - l * params.omega_r;
    if (policy.include_second_order) {
        detuning += 0.25 * (diagonal_correction_static(Spin::down, st.j_down, l, eps0, params, policy).value +
                            diagonal_correction_static(Spin::up, st.j_up, l, eps0, params, policy).value);
    }
    const double coupling = specfun::dressed_delta_static(params.delta, j, j + std::abs(l),
                                                          alpha_tilde(params.g, params.omega_r));
    return std::hypot(detuning, coupling);
}

double static_energies(Branch branch, int j, int l, double eps0, const ModelParams& params,
                       const CorrectionPolicy& policy) {
    const auto st = doublet_states(j, l);
    const double split = static_splitting(j, l, eps0, params, policy);
    double shift = 0.0;
    if (policy.include_second_order) {
        shift = 0.125 * (diagonal_correction_static(Spin::down, st.j_down, l, eps0, params, policy).value -
                         diagonal_correction_static(Spin::up, st.j_up, l, eps0, params, policy).value);
    }
    const double s = branch == Branch::lower ? -1.0 : 1.0;
    return 0.5 * (st.j_down + st.j_up) * params.omega_r - params.g * params.g / params.omega_r +
           shift + s * 0.5 * split;
}

Correction diagonal_correction_driven(Spin spin, int j, int m, int l, double eps0,
                                      const ModelParams& params, const CorrectionPolicy& policy) {
    policy.validate();
    if (j < 0) {
        throw DomainError("diagonal_correction_driven: j must be >= 0");
    }
    const double at = alpha_tilde(params.g, params.omega_r);
    const double x = params.omega_d > 0.0 ? params.eps_d / params.omega_d : 0.0;
    const double sign = spin == Spin::down ? -1.0 : 1.0;
    const int k_excluded = spin == Spin::down ? l : -l;

    // Static dressed elements do not depend on p; cache them once.
    std::vector<double> d2(static_cast<std::size_t>(policy.k_max + j + 1));
    for (int k = -j; k <= policy.k_max; ++k) {
        const double d = specfun::dressed_delta_static(params.delta, j, j + k, at);
        d2[static_cast<std::size_t>(k + j)] = d * d;
    }

    Correction c;
    double outer_shell = 0.0;
    for (int p = -policy.p_max; p <= policy.p_max; ++p) {
        const double jp = specfun::bessel_j(p, x);
        const double jp2 = jp * jp;
        if (jp2 == 0.0) {
            continue;
        }
        double shell = 0.0;
        for (int k = -j; k <= policy.k_max; ++k) {
            if (p == m && k == k_excluded) {
                continue;
            }
            const double num = jp2 * d2[static_cast<std::size_t>(k + j)];
            if (num == 0.0) {
                continue;
            }
            const double denom = eps0 + p * params.omega_d + sign * k * params.omega_r;
            if (std::abs(denom) < policy.resonance_guard) {
                throw_resonance(eps0, p, k, denom);
            }
            shell += num / denom;
        }
        c.value += shell;
        if (std::abs(p) == policy.p_max) {
            outer_shell += std::abs(shell);
        }
    }
    c.remainder = outer_shell;
    c.converged = outer_shell <= 1e-8;
    return c;
}

double driven_splitting(const DoubletIndex& idx, double eps0, const ModelParams& params,
                        const CorrectionPolicy& policy) {
    const auto st = doublet_states(idx.j, idx.l);
    double detuning = eps0 + idx.m * params.omega_d - idx.l * params.omega_r;
    if (policy.include_second_order) {
        detuning += 0.25 * (diagonal_correction_driven(Spin::down, st.j_down, idx.m, idx.l, eps0, params, policy).value +
                            diagonal_correction_driven(Spin::up, st.j_up, idx.m, idx.l, eps0, params, policy).value);
    }
    const specfun::DressingArgs args{alpha_tilde(params.g, params.omega_r),
                                     params.omega_d > 0.0 ? params.eps_d / params.omega_d : 0.0};
    const double coupling = specfun::dressed_delta_driven(params.delta, idx.n, idx.n + idx.m, idx.j,
                                                          idx.j + std::abs(idx.l), args);
    return std::hypot(detuning, coupling);
}

double driven_quasienergies(Branch branch, const DoubletIndex& idx, double eps0,
                            const ModelParams& params, const CorrectionPolicy& policy) {
    const auto st = doublet_states(idx.j, idx.l);
    const double split = driven_splitting(idx, eps0, params, policy);
    double shift = 0.0;
    if (policy.include_second_order) {
        shift = 0.125 * (diagonal_correction_driven(Spin::down, st.j_down, idx.m, idx.l, eps0, params, policy).value -
                         diagonal_correction_driven(Spin::up, st.j_up, idx.m, idx.l, eps0, params, policy).value);
    }
    const double s = branch == Branch::lower ? -1.0 : 1.0;
    return -(idx.n + 0.5 * idx.m) * params.omega_d + 0.5 * (st.j_down + st.j_up) * params.omega_r -
           params.g * params.g / params.omega_r + shift + s * 0.5 * split;
}

double transition_frequency(const DoubletIndex& idx, double eps0, const ModelParams& params,
                            const CorrectionPolicy& policy, bool renormalize,
                            const BathSpec& bath) {
    ModelParams p = params;
    if (renormalize) {
        p.delta = renormalized_delta(params.delta, bath.alpha1, bath.omega_c, bath.temp1);
    }
    if (p.eps_d == 0.0 && idx.m == 0) {
        return static_energies(Branch::upper, idx.j, idx.l, eps0, p, policy) -
               static_energies(Branch::lower, idx.j, idx.l, eps0, p, policy);
    }
    return driven_quasienergies(Branch::upper, idx, eps0, p, policy) -
           driven_quasienergies(Branch::lower, idx, eps0, p, policy);
}

} // namespace rabispec::vanvleck
