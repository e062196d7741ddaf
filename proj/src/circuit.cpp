#include "qembed/circuit.hpp"

#include <cmath>

#include "qembed/error.hpp"

namespace qembed {

Circuit& Circuit::push(Gate g) {
  auto check = [this](int q) {
    if (q < 0 || q >= n_qubits_)
      throw Error("gate qubit " + std::to_string(q) + " outside " + std::to_string(n_qubits_) +
                  "-qubit circuit");
  };
  check(g.target);
  if (g.two_qubit()) {
    check(g.control);
    if (g.control == g.target) throw Error("CNOT control equals target");
  }
  if (g.param >= 0) n_params_ = std::max(n_params_, g.param + 1);
  gates_.push_back(g);
  return *this;
}

Circuit& Circuit::x(int q) { return push({GateKind::X, q}); }
Circuit& Circuit::h(int q) { return push({GateKind::H, q}); }
Circuit& Circuit::s(int q) { return push({GateKind::S, q}); }
Circuit& Circuit::sdg(int q) { return push({GateKind::Sdg, q}); }
Circuit& Circuit::rz(int q, double angle) { return push({GateKind::RZ, q, -1, angle}); }
Circuit& Circuit::rz_param(int q, int slot, double scale) {
  if (slot < 0) throw Error("parameter slot must be non-negative");
  return push({GateKind::RZ, q, -1, scale, slot});
}
Circuit& Circuit::cnot(int control, int target) {
  return push({GateKind::CNOT, target, control});
}

Circuit& Circuit::pauli(int q, PauliOp op) {
  switch (op) {
    case PauliOp::I: return *this;
    case PauliOp::X: return push({GateKind::X, q});
    case PauliOp::Y: return push({GateKind::Y, q});
    case PauliOp::Z: return push({GateKind::Z, q});
  }
  return *this;
}

Circuit& Circuit::append(const Circuit& other) {
  if (other.n_qubits_ > n_qubits_) throw Error("appended circuit is wider");
  for (const auto& g : other.gates_) push(g);
  return *this;
}

Circuit Circuit::bind(const std::vector<double>& params) const {
  if (static_cast<int>(params.size()) < n_params_)
    throw Error("circuit needs " + std::to_string(n_params_) + " parameters, got " +
                std::to_string(params.size()));
  Circuit out(n_qubits_);
  for (auto g : gates_) {
    if (g.param >= 0) {
      g.angle *= params[static_cast<std::size_t>(g.param)];
      g.param = -1;
    }
    out.push(g);
  }
  return out;
}

bool Circuit::is_bound() const { return n_params_ == 0; }

void apply_gate(Eigen::VectorXcd& state, const Gate& g) {
  using C = std::complex<double>;
  const Eigen::Index dim = state.size();
  const Eigen::Index bit = Eigen::Index{1} << g.target;
  static const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::CNOT: {
      const Eigen::Index cbit = Eigen::Index{1} << g.control;
      for (Eigen::Index i = 0; i < dim; ++i)
        if ((i & cbit) && !(i & bit)) std::swap(state(i), state(i | bit));
      return;
    }
    case GateKind::X:
      for (Eigen::Index i = 0; i < dim; ++i)
        if (!(i & bit)) std::swap(state(i), state(i | bit));
      return;
    case GateKind::Y:
      for (Eigen::Index i = 0; i < dim; ++i)
        if (!(i & bit)) {
          const C a0 = state(i), a1 = state(i | bit);
          state(i) = C(0, -1) * a1;
          state(i | bit) = C(0, 1) * a0;
        }
      return;
    case GateKind::Z:
      for (Eigen::Index i = 0; i < dim; ++i)
        if (i & bit) state(i) = -state(i);
      return;
    case GateKind::H:
      for (Eigen::Index i = 0; i < dim; ++i)
        if (!(i & bit)) {
          const C a0 = state(i), a1 = state(i | bit);
          state(i) = kInvSqrt2 * (a0 + a1);
          state(i | bit) = kInvSqrt2 * (a0 - a1);
        }
      return;
    case GateKind::S:
    case GateKind::Sdg: {
      const C phase = g.kind == GateKind::S ? C(0, 1) : C(0, -1);
      for (Eigen::Index i = 0; i < dim; ++i)
        if (i & bit) state(i) *= phase;
      return;
    }
    case GateKind::RZ: {
      if (g.param >= 0) throw Error("unbound parameter slot in circuit");
      const C lo = std::polar(1.0, -0.5 * g.angle), hi = std::polar(1.0, 0.5 * g.angle);
      for (Eigen::Index i = 0; i < dim; ++i) state(i) *= (i & bit) ? hi : lo;
      return;
    }
  }
}

Eigen::VectorXcd simulate_statevector(const Circuit& circ) {
  if (circ.n_qubits() > kMaxStatevectorQubits)
    throw Error("statevector simulation limited to " + std::to_string(kMaxStatevectorQubits) +
                " qubits");
  if (!circ.is_bound()) throw Error("circuit has unbound parameters");
  Eigen::VectorXcd state = Eigen::VectorXcd::Zero(Eigen::Index{1} << circ.n_qubits());
  state(0) = 1.0;
  for (const auto& g : circ.gates()) apply_gate(state, g);
  return state;
}

Circuit yxxx_template(int n_qubits, std::uint64_t reference) {
  if (n_qubits != 4) throw Error("the YXXX ansatz is defined on exactly 4 qubits");
  if (reference >> 4) throw Error("reference occupation outside the 4-qubit register");
  Circuit c(4);
  for (int q = 0; q < 4; ++q)
    if ((reference >> q) & 1U) c.x(q);
  c.sdg(0).h(0);
  for (int q = 1; q < 4; ++q) c.h(q);
  for (int q = 0; q < 3; ++q) c.cnot(q, q + 1);
  c.rz_param(3, 0);
  for (int q = 2; q >= 0; --q) c.cnot(q, q + 1);
  c.h(0).s(0);
  for (int q = 1; q < 4; ++q) c.h(q);
  return c;
}

Circuit build_yxxx_ansatz(double theta, int n_qubits, std::uint64_t reference) {
  return yxxx_template(n_qubits, reference).bind({theta});
}

Circuit measurement_rotation(const std::vector<PauliOp>& basis) {
  Circuit c(static_cast<int>(basis.size()));
  for (std::size_t q = 0; q < basis.size(); ++q) {
    const int iq = static_cast<int>(q);
    if (basis[q] == PauliOp::X) c.h(iq);
    if (basis[q] == PauliOp::Y) c.sdg(iq).h(iq);
  }
  return c;
}

}  // namespace qembed
