#pragma once

#include <Eigen/Core>

#include "qembed/dmet.hpp"
#include "qembed/hamiltonian.hpp"

namespace qembed {

/// Embedding problem reduced to an active window of canonical mean-field
/// orbitals; doubly occupied core orbitals are folded into `constant` and a
/// dressed one-electron term.
struct ActiveSpaceProblem {
  SpatialHamiltonian hamiltonian;
  Eigen::MatrixXd core_orbitals;    // embedding basis x n_core
  Eigen::MatrixXd active_orbitals;  // embedding basis x n_active
  int n_active_electrons = 0;
  double reference_energy = 0.0;    // mean-field energy of the embedding problem
};

ActiveSpaceProblem make_active_space(const EmbeddingProblem& prob, const ActiveSpace& active);

/// Spin-summed active-space RDMs expressed over the full embedding space,
/// with the frozen core added back.
std::pair<Eigen::MatrixXd, Eri> expand_active_rdms(const ActiveSpaceProblem& as,
                                                   const Eigen::MatrixXd& rdm1_active,
                                                   const Eri& rdm2_active);

/// Packs a solved active-space state into a FragmentSolution.
FragmentSolution assemble_fragment_solution(const EmbeddingProblem& prob,
                                            const ActiveSpaceProblem& as,
                                            const Eigen::MatrixXd& rdm1_active,
                                            const Eri& rdm2_active, double e_active);

}  // namespace qembed
