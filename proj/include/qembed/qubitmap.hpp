#pragma once

#include <string>
#include <vector>

#include "qembed/dmet.hpp"
#include "qembed/fermion.hpp"
#include "qembed/hamiltonian.hpp"
#include "qembed/pauli.hpp"

namespace qembed {

// Spin orbitals are interleaved: mode 2p is orbital p spin alpha, 2p+1 is
// spin beta. Under Jordan-Wigner, mode j is qubit j.
inline int alpha_mode(int p) { return 2 * p; }
inline int beta_mode(int p) { return 2 * p + 1; }

/// Second-quantized Hamiltonian, normal ordered:
///   constant + sum h_pq a+_{p s} a_{q s}
///   + 1/2 sum (pq|rs) a+_{p s} a+_{r t} a_{s t} a_{q s}
/// with the chemists' (pq|rs) mapped to physicists' <pr|qs>.
FermionOperator fermion_hamiltonian(const SpatialHamiltonian& ham);
FermionOperator fermion_hamiltonian(const EmbeddingProblem& prob);

/// a+_j -> (X_j - i Y_j)/2 Z_0...Z_{j-1}. Imaginary parts below 1e-12 are
/// dropped, as are zero terms.
QubitOperator jordan_wigner(const FermionOperator& op, int n_qubits);

inline QubitOperator qubit_hamiltonian(const SpatialHamiltonian& ham) {
  return jordan_wigner(fermion_hamiltonian(ham), 2 * static_cast<int>(ham.n_orbitals()));
}

/// Z2 symmetry with the eigenvalue the prepared state must carry.
struct Symmetry {
  PauliString string;
  int eigenvalue = 1;
  std::string label;
};

/// Spin-parity strings (Z on alpha qubits, Z on beta qubits) and total
/// parity; candidates that fail to commute with every term are dropped
/// with a warning.
std::vector<Symmetry> find_z2_symmetries(const QubitOperator& op, int n_alpha, int n_beta);

/// Qubit-wise commuting measurement setting. Qubits no member touches are
/// measured in Z.
struct MeasurementGroup {
  int id = 0;
  int n_qubits = 0;
  std::vector<PauliOp> basis;  // per qubit, X, Y or Z
  std::vector<std::pair<PauliString, Complex>> terms;
  std::vector<Symmetry> symmetries;  // diagonal in this basis

  /// Whether p is measurable in this setting.
  bool accepts(const PauliString& p) const;
};

/// Greedy first-fit grouping in canonical term order. The identity term is
/// left out; add op.constant() classically. Symmetries are attached to
/// every group in which they are diagonal.
std::vector<MeasurementGroup> partition_commuting(const QubitOperator& op,
                                                  const std::vector<Symmetry>& symmetries = {});

}  // namespace qembed
