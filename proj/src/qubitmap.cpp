#include "qembed/qubitmap.hpp"

#include <bit>

#include "qembed/error.hpp"
#include "qembed/log.hpp"

namespace qembed {

FermionOperator fermion_hamiltonian(const SpatialHamiltonian& ham) {
  const int n = static_cast<int>(ham.n_orbitals());
  FermionOperator op = FermionOperator::constant(ham.constant);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      const double h = ham.h(p, q);
      if (h == 0.0) continue;
      for (int s = 0; s < 2; ++s) op.add({{2 * p + s, true}, {2 * q + s, false}}, h);
    }
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          const double v = ham.eri(static_cast<std::size_t>(p), static_cast<std::size_t>(q),
                                   static_cast<std::size_t>(r), static_cast<std::size_t>(s));
          if (v == 0.0) continue;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
              const int pa = 2 * p + a, qa = 2 * q + a, rb = 2 * r + b, sb = 2 * s + b;
              if (pa == rb || qa == sb) continue;
              op.add({{pa, true}, {rb, true}, {sb, false}, {qa, false}}, 0.5 * v);
            }
        }
  return op.normal_ordered();
}

FermionOperator fermion_hamiltonian(const EmbeddingProblem& prob) {
  return fermion_hamiltonian(prob.hamiltonian());
}

namespace {

QubitOperator ladder_to_qubits(const LadderOp& op, int n_qubits) {
  const std::uint64_t tail = (std::uint64_t{1} << op.mode) - 1;
  const std::uint64_t bit = std::uint64_t{1} << op.mode;
  QubitOperator q(n_qubits);
  q.add(PauliString(bit, tail), 0.5);                                         // X_j Z_<j
  q.add(PauliString(bit, tail | bit), Complex(0.0, op.dagger ? -0.5 : 0.5));  // Y_j Z_<j
  return q;
}

}  // namespace

QubitOperator jordan_wigner(const FermionOperator& op, int n_qubits) {
  if (op.max_mode() >= n_qubits)
    throw Error("fermion operator acts on mode " + std::to_string(op.max_mode()) + " but only " +
                std::to_string(n_qubits) + " qubits requested");
  QubitOperator out(n_qubits);
  for (const auto& [term, c] : op.terms()) {
    QubitOperator prod = QubitOperator::identity(n_qubits, c);
    for (const auto& l : term) prod = prod * ladder_to_qubits(l, n_qubits);
    out += prod;
  }
  out.prune();
  QubitOperator cleaned(n_qubits);
  for (const auto& [p, c] : out.terms())
    cleaned.add(p, std::abs(c.imag()) < 1e-12 ? Complex(c.real(), 0.0) : c);
  return cleaned.prune();
}

std::vector<Symmetry> find_z2_symmetries(const QubitOperator& op, int n_alpha, int n_beta) {
  const int n = op.n_qubits();
  if (n % 2 != 0) throw Error("spin-orbital register must have an even number of qubits");
  std::uint64_t even = 0, odd = 0;
  for (int q = 0; q < n; ++q) (q % 2 ? odd : even) |= std::uint64_t{1} << q;
  auto parity = [](int count) { return count % 2 ? -1 : 1; };
  const std::vector<Symmetry> candidates = {
      {PauliString(0, even), parity(n_alpha), "alpha-parity"},
      {PauliString(0, odd), parity(n_beta), "beta-parity"},
      {PauliString(0, even | odd), parity(n_alpha + n_beta), "parity"},
  };
  std::vector<Symmetry> out;
  for (const auto& s : candidates) {
    bool ok = true;
    for (const auto& [p, c] : op.terms())
      if (!s.string.commutes_with(p)) {
        warn("symmetry " + s.string.to_string() + " does not commute with " + p.to_string() +
             "; dropped");
        ok = false;
        break;
      }
    if (ok) out.push_back(s);
  }
  return out;
}

bool MeasurementGroup::accepts(const PauliString& p) const {
  for (int q = 0; q < n_qubits; ++q) {
    const auto o = p.op(q);
    if (o != PauliOp::I && o != basis[static_cast<std::size_t>(q)]) return false;
  }
  return true;
}

std::vector<MeasurementGroup> partition_commuting(const QubitOperator& op,
                                                  const std::vector<Symmetry>& symmetries) {
  const int n = op.n_qubits();
  // Open slots are I until a member fixes them.
  std::vector<std::vector<PauliOp>> fixed;
  std::vector<MeasurementGroup> groups;
  for (const auto& [p, c] : op.terms()) {
    if (p.is_identity()) continue;
    std::size_t g = 0;
    for (; g < groups.size(); ++g) {
      bool fits = true;
      for (int q = 0; q < n && fits; ++q) {
        const auto o = p.op(q);
        const auto f = fixed[g][static_cast<std::size_t>(q)];
        fits = o == PauliOp::I || f == PauliOp::I || o == f;
      }
      if (fits) break;
    }
    if (g == groups.size()) {
      groups.push_back({});
      groups.back().id = static_cast<int>(g);
      groups.back().n_qubits = n;
      fixed.emplace_back(static_cast<std::size_t>(n), PauliOp::I);
    }
    for (int q = 0; q < n; ++q)
      if (p.op(q) != PauliOp::I) fixed[g][static_cast<std::size_t>(q)] = p.op(q);
    groups[g].terms.emplace_back(p, c);
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    auto& grp = groups[g];
    grp.basis = fixed[g];
    for (auto& b : grp.basis)
      if (b == PauliOp::I) b = PauliOp::Z;
    for (const auto& s : symmetries)
      if (grp.accepts(s.string)) grp.symmetries.push_back(s);
  }
  return groups;
}

}  // namespace qembed
