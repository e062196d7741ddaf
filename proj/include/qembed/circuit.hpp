#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "qembed/pauli.hpp"

namespace qembed {

enum class GateKind { X, Y, Z, H, S, Sdg, RZ, CNOT };

struct Gate {
  GateKind kind = GateKind::X;
  int target = 0;
  int control = -1;   // CNOT only
  double angle = 0.0; // RZ only
  int param = -1;     // RZ angle = angle * params[param] when param >= 0

  bool two_qubit() const { return kind == GateKind::CNOT; }
};

/// Gate list on n qubits. Basis index bit q is qubit q (qubit 0 least
/// significant).
class Circuit {
 public:
  explicit Circuit(int n_qubits = 0) : n_qubits_(n_qubits) {}

  int n_qubits() const { return n_qubits_; }
  int n_params() const { return n_params_; }
  const std::vector<Gate>& gates() const { return gates_; }

  Circuit& x(int q);
  Circuit& h(int q);
  Circuit& s(int q);
  Circuit& sdg(int q);
  Circuit& rz(int q, double angle);
  /// RZ(scale * params[slot]).
  Circuit& rz_param(int q, int slot, double scale = 1.0);
  Circuit& cnot(int control, int target);
  Circuit& pauli(int q, PauliOp op);  // no-op for I
  Circuit& append(const Circuit& other);

  /// Copy with every parameter slot replaced by its value.
  Circuit bind(const std::vector<double>& params) const;
  bool is_bound() const;

 private:
  Circuit& push(Gate g);

  int n_qubits_ = 0;
  int n_params_ = 0;
  std::vector<Gate> gates_;
};

inline constexpr int kMaxStatevectorQubits = 20;

/// Runs a bound circuit from |0...0>.
Eigen::VectorXcd simulate_statevector(const Circuit& circ);
/// Applies one gate in place.
void apply_gate(Eigen::VectorXcd& state, const Gate& g);

/// Reference preparation followed by exp(-i theta/2 Y0 X1 X2 X3): basis
/// change, CNOT ladder, RZ(theta) on qubit 3, ladder back, basis restore.
/// `reference` is the occupied-qubit mask (default: qubits 0 and 1).
Circuit build_yxxx_ansatz(double theta, int n_qubits = 4, std::uint64_t reference = 0b0011);
/// Same circuit with theta left as parameter slot 0.
Circuit yxxx_template(int n_qubits = 4, std::uint64_t reference = 0b0011);

/// Gates rotating each qubit's measurement basis onto Z (X: H, Y: S-dagger
/// then H).
Circuit measurement_rotation(const std::vector<PauliOp>& basis);

}  // namespace qembed
