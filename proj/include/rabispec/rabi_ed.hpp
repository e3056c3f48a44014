// rabi_ed.hpp: Exact diagonalization of the closed Rabi Hamiltonian
//
// H = -(1/2)(Delta sx + eps0 sz) + Omega B^dag B - g sz (B^dag + B) on the
// truncated space qubit x Fock(n_fock). Basis index 2 j + q with q = 0 for
// sz = +1 and q = 1 for sz = -1, so the qubit index runs fastest.

#pragma once

#include <cstddef>
#include <vector>

#include "rabispec/params.hpp"

namespace rabispec::ed {

class TruncatedRabiHamiltonian {
public:
    TruncatedRabiHamiltonian(int n_fock, std::vector<double> matrix);

    int n_fock() const { return n_fock_; }
    std::size_t dimension() const { return 2 * static_cast<std::size_t>(n_fock_); }
    double operator()(std::size_t row, std::size_t col) const { return m_[row * dimension() + col]; }
    const std::vector<double>& data() const { return m_; } // row-major

    static std::size_t index(int fock, int sz_sign) { return 2 * static_cast<std::size_t>(fock) + (sz_sign > 0 ? 0 : 1); }

private:
    int n_fock_;
    std::vector<double> m_;
};

/// Dense Hamiltonian; drive, probe and baths are ignored. Requires n_fock >= 2.
TruncatedRabiHamiltonian build_hamiltonian(const ModelParams& params, int n_fock);

/// Ascending eigenvalues. Throws NumericalError if the eigensolver fails.
std::vector<double> eigenvalues(const TruncatedRabiHamiltonian& h);

enum class Reference { ground, first_excited };

/// E_k - E_ref for every level above the reference.
std::vector<double> transition_energies(const std::vector<double>& sorted_levels, Reference from);
std::vector<double> transition_energies(const TruncatedRabiHamiltonian& h, Reference from);

/// |E_level(n_fock) - E_level(2 n_fock)|.
double truncation_error(const ModelParams& params, int n_fock, std::size_t level);

} // namespace rabispec::ed
