// vanvleck.hpp: Analytic spectra of the closed Rabi model
//
// Leading-order (Floquet-)Van Vleck energies around the degeneracy points
// eps0 = l Omega - m omega_d. A doublet (j, l) pairs the qubit state at
// +eps0/2 carrying j_down oscillator quanta with the state at -eps0/2
// carrying j_up = j_down + l quanta; j is always the smaller of the two, so
// j_down = j + max(0, -l) and j_up = j + max(0, l). For l >= 0 this is the
// usual (j, j + l) labelling, and for l < 0 it keeps j = 0 meaningful for the
// l = -1 sideband.

#pragma once

#include "rabispec/params.hpp"

namespace rabispec::vanvleck {

enum class Branch { lower, upper }; // the -/+ member of a doublet
enum class Spin { down, up };       // qubit state entering a diagonal correction

struct CorrectionPolicy {
    bool include_second_order{false};
    int k_max{60};
    int p_max{30};
    double resonance_guard{1e-6};

    void validate() const;
};

/// Index set of a doublet; static spectra use m = n = 0.
struct DoubletIndex {
    int l{0};
    int m{0};
    int j{0};
    int n{0};
};

/// Truncated diagonal-correction sum with the magnitude of the last retained
/// term (static) or of the outermost Floquet shell (driven) as a remainder
/// estimate.
struct Correction {
    double value{0.0};
    double remainder{0.0};
    bool converged{true};
};

/// E_{-/+,j} = -/+ eps0/2 + j Omega - g^2/Omega, exact at Delta = 0.
double delta0_energies(double eps0, double omega_r, double g, int j, Branch branch);

/// eps^{(2),l}_{down/up,j}: second-order shift sum for the state (spin, j)
/// near the degeneracy l, excluding its resonant partner k = +l (down) or
/// k = -l (up). Throws NearResonanceError when a retained denominator is below
/// the guard.
Correction diagonal_correction_static(Spin spin, int j, int l, double eps0,
                                      const ModelParams& params, const CorrectionPolicy& policy);

/// Omega^l_j, the splitting of doublet (j, l).
double static_splitting(int j, int l, double eps0, const ModelParams& params,
                        const CorrectionPolicy& policy);

/// E^l_{-/+,j}.
double static_energies(Branch branch, int j, int l, double eps0, const ModelParams& params,
                       const CorrectionPolicy& policy);

/// Driven diagonal correction for the state (spin, Floquet n, oscillator j);
/// the single term (p, k) = (m, +/-l) resonant with the doublet partner is
/// excluded. `converged` is false when the outermost p shell contributes more
/// than 1e-8.
Correction diagonal_correction_driven(Spin spin, int j, int m, int l, double eps0,
                                      const ModelParams& params, const CorrectionPolicy& policy);

/// Omega^{m,l}_{n,j}.
double driven_splitting(const DoubletIndex& idx, double eps0, const ModelParams& params,
                        const CorrectionPolicy& policy);

/// E^{m,l}_{-/+,n,j}, reported unfolded (no reduction modulo omega_d).
double driven_quasienergies(Branch branch, const DoubletIndex& idx, double eps0,
                            const ModelParams& params, const CorrectionPolicy& policy);

/// Transition frequency E_+ - E_- of a doublet. Uses the static formulas when
/// both the drive amplitude and m vanish, the driven ones otherwise. With
/// `renormalize`, Delta is replaced by Delta_T from the qubit bath first.
double transition_frequency(const DoubletIndex& idx, double eps0, const ModelParams& params,
                            const CorrectionPolicy& policy, bool renormalize,
                            const BathSpec& bath);

} // namespace rabispec::vanvleck
