#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "qembed/hamiltonian.hpp"

namespace qembed {

inline constexpr std::size_t kMaxFciSpinOrbitals = 16;

/// Determinant-basis exact diagonalization at fixed (n_alpha, n_beta).
/// Spin orbitals are interleaved: 2p is alpha, 2p+1 is beta.
struct FciResult {
  double energy = 0.0;  // includes ham.constant
  std::vector<std::uint64_t> determinants;
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd rdm1;
  Eri rdm2;
};

/// Throws when the space exceeds kMaxFciSpinOrbitals spin orbitals.
FciResult solve_fci(const SpatialHamiltonian& ham, int n_alpha, int n_beta,
                    bool compute_rdms = true);

}  // namespace qembed
