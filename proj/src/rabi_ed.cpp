#include "rabispec/rabi_ed.hpp"

#include <algorithm>
#include <cmath>
#include <Eigen/Dense>

#include "rabispec/errors.hpp"

namespace rabispec::ed {

TruncatedRabiHamiltonian::TruncatedRabiHamiltonian(int n_fock, std::vector<double> matrix)
    : n_fock_(n_fock)
    , m_(std::move(matrix)) {
    if (n_fock < 2 || m_.size() != dimension() * dimension()) {
        throw DomainError("TruncatedRabiHamiltonian: n_fock >= 2 and a square matrix required");
    }
}

TruncatedRabiHamiltonian build_hamiltonian(const ModelParams& params, int n_fock) {
    if (n_fock < 2) {
        throw DomainError("build_hamiltonian: n_fock >= 2 required");
    }
    const std::size_t dim = 2 * static_cast<std::size_t>(n_fock);
    std::vector<double> m(dim * dim, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return m[r * dim + c]; };

    for (int j = 0; j < n_fock; ++j) {
        for (int sz : {+1, -1}) {
            const std::size_t i = TruncatedRabiHamiltonian::index(j, sz);
            at(i, i) = -0.5 * params.eps0 * sz + params.omega_r * j;
            // sx flips the qubit within the same Fock state
            at(i, TruncatedRabiHamiltonian::index(j, -sz)) = -0.5 * params.delta;
            if (j + 1 < n_fock) {
                const std::size_t k = TruncatedRabiHamiltonian::index(j + 1, sz);
                const double v = -params.g * sz * std::sqrt(static_cast<double>(j + 1));
                at(i, k) = v;
                at(k, i) = v;
            }
        }
    }
    return TruncatedRabiHamiltonian(n_fock, std::move(m));
}

std::vector<double> eigenvalues(const TruncatedRabiHamiltonian& h) {
    const auto dim = static_cast<Eigen::Index>(h.dimension());
    const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> mat(
        h.data().data(), dim, dim);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(mat, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigenvalues: symmetric eigensolver did not converge");
    }
    std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + dim);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> transition_energies(const std::vector<double>& sorted_levels, Reference from) {
    const std::size_t ref = from == Reference::ground ? 0 : 1;
    if (sorted_levels.size() <= ref) {
        throw DomainError("transition_energies: not enough levels");
    }
    std::vector<double> out;
    out.reserve(sorted_levels.size() - ref - 1);
    for (std::size_t k = ref + 1; k < sorted_levels.size(); ++k) {
        out.push_back(sorted_levels[k] - sorted_levels[ref]);
    }
    return out;
}

std::vector<double> transition_energies(const TruncatedRabiHamiltonian& h, Reference from) {
    return transition_energies(eigenvalues(h), from);
}

double truncation_error(const ModelParams& params, int n_fock, std::size_t level) {
    const auto a = eigenvalues(build_hamiltonian(params, n_fock));
    const auto b = eigenvalues(build_hamiltonian(params, 2 * n_fock));
    if (level >= a.size()) {
        throw DomainError("truncation_error: level outside the truncated spectrum");
    }
    return std::abs(a[level] - b[level]);
}

} // namespace rabispec::ed
