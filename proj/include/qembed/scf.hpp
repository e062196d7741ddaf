#pragma once

#include <Eigen/Core>
#include <optional>

#include "qembed/integrals.hpp"

namespace qembed {

struct ScfOptions {
  int max_iter = 200;
  double commutator_tol = 1e-8;  // max |FDS - SDF| element
  double energy_tol = 1e-10;
  int diis_size = 8;
};

/// Closed-shell RHF result. Densities are spin-summed.
struct ScfSolution {
  Eigen::MatrixXd mo_coeffs;   // n_ao x n_mo, C^T S C = 1
  Eigen::VectorXd mo_energies;
  Eigen::MatrixXd density;     // 2 C_occ C_occ^T
  Eigen::MatrixXd fock;
  double e_total = 0.0;
  double e_electronic = 0.0;
  double e_nuc = 0.0;
  int n_occ = 0;
  bool converged = false;
  int n_iterations = 0;
  double commutator = 0.0;
};

/// RHF with core-Hamiltonian guess and DIIS. Throws ConvergenceError after
/// max_iter and Error for odd or too few electrons.
ScfSolution run_rhf(const IntegralSet& ints, int n_electrons, const ScfOptions& opts = {});

/// Same solver on raw matrices. `guess` is a spin-summed density; the
/// core-Hamiltonian guess is used when absent.
ScfSolution run_rhf(const Eigen::MatrixXd& overlap, const Eigen::MatrixXd& h_core,
                    const Eri& eri, double e_nuc, int n_electrons,
                    const ScfOptions& opts = {},
                    const std::optional<Eigen::MatrixXd>& guess = std::nullopt);

/// Symmetric orthogonalizer S^{-1/2}. Throws when the smallest overlap
/// eigenvalue is below 1e-10.
Eigen::MatrixXd lowdin_transform(const Eigen::MatrixXd& overlap);

/// Per-spin one-particle RDM in the Lowdin basis; trace = n_occ.
struct LocalizedRdm {
  Eigen::MatrixXd x;      // S^{-1/2}
  Eigen::MatrixXd gamma;  // idempotent
};

LocalizedRdm localized_rdm(const ScfSolution& scf, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& overlap);

/// RHF electronic energy of a spin-summed density.
double rhf_energy(const Eigen::MatrixXd& h_core, const Eri& eri, const Eigen::MatrixXd& density);

/// Two-electron part of the closed-shell Fock matrix, J - K/2.
Eigen::MatrixXd rhf_two_electron(const Eri& eri, const Eigen::MatrixXd& density);

}  // namespace qembed
