#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <random>

#include "../oracles/fock_space.hpp"
#include "qembed/basis.hpp"
#include "qembed/circuit.hpp"
#include "qembed/dmet.hpp"
#include "qembed/fci.hpp"
#include "qembed/integrals.hpp"
#include "qembed/qubitmap.hpp"
#include "qembed/scf.hpp"
#include "qembed/shots.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace qembed;

namespace {

QubitOperator parse_op(const char* text, int n) { return QubitOperator::from_text(text, n); }

double max_abs_coefficient(const QubitOperator& op) {
  double m = 0.0;
  for (const auto& [p, c] : op.terms()) m = std::max(m, std::abs(c));
  return m;
}

SpatialHamiltonian lowdin_hamiltonian(const Molecule& mol) {
  const auto basis = build_basis(mol, "sto-3g");
  const auto ints = compute_integrals(mol, basis);
  const auto lo = to_lowdin(ints, lowdin_transform(ints.overlap));
  return {lo.e_nuc, lo.h, lo.eri};
}

SpatialHamiltonian mo_hamiltonian(const Molecule& mol) {
  const auto basis = build_basis(mol, "sto-3g");
  const auto ints = compute_integrals(mol, basis);
  const auto scf = run_rhf(ints, mol.n_electrons);
  return {ints.e_nuc, scf.mo_coeffs.transpose() * ints.h_core * scf.mo_coeffs,
          transform(ints.eri, scf.mo_coeffs)};
}

SpatialHamiltonian random_hamiltonian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  SpatialHamiltonian ham;
  ham.constant = u(rng);
  ham.h = Eigen::MatrixXd::Zero(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q <= p; ++q) ham.h(p, q) = ham.h(q, p) = u(rng);
  // Positive-semidefinite (pq|rs) from a random factor keeps all 8-fold symmetries.
  const auto un = static_cast<std::size_t>(n);
  const int k = n * n;
  Eigen::MatrixXd l(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) l(a, b) = u(rng);
  ham.eri = Eri(un);
  for (std::size_t p = 0; p < un; ++p)
    for (std::size_t q = 0; q < un; ++q)
      for (std::size_t r = 0; r < un; ++r)
        for (std::size_t s = 0; s < un; ++s) {
          auto sym = [&](std::size_t a, std::size_t b) {
            return static_cast<Eigen::Index>(std::min(a, b) * un + std::max(a, b));
          };
          ham.eri(p, q, r, s) = 0.1 * l.row(sym(p, q)).dot(l.row(sym(r, s))) / k;
        }
  return ham;
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Eigen::VectorXd oracle_spectrum(const SpatialHamiltonian& ham) {
  const auto f = oracle::build(ham.h, ham.eri, ham.constant);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

bool all_qwc(const MeasurementGroup& g) {
  for (const auto& [a, ca] : g.terms)
    for (const auto& [b, cb] : g.terms)
      if (!a.qubitwise_commutes_with(b)) return false;
  return true;
}

}  // namespace

TEST_CASE("Pauli algebra", "[qubitmap]") {
  const auto x = PauliString::single(0, PauliOp::X);
  const auto y = PauliString::single(0, PauliOp::Y);
  const auto z = PauliString::single(0, PauliOp::Z);
  auto [phase, p] = multiply(x, y);
  CHECK(p == z);
  CHECK(phase == Complex(0, 1));
  std::tie(phase, p) = multiply(y, x);
  CHECK(phase == Complex(0, -1));
  std::tie(phase, p) = multiply(z, z);
  CHECK(p.is_identity());
  CHECK(phase == Complex(1, 0));

  SECTION("products close over random strings") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      const PauliString a(rng() & 0x3f, rng() & 0x3f), b(rng() & 0x3f, rng() & 0x3f);
      const auto [ph, prod] = multiply(a, b);
      CHECK(std::abs(std::abs(ph) - 1.0) < 1e-15);
      CHECK((ph.real() == 0.0 || ph.imag() == 0.0));
      CHECK(prod.x_mask() == (a.x_mask() ^ b.x_mask()));
      CHECK(prod.z_mask() == (a.z_mask() ^ b.z_mask()));
      const auto lhs = QubitOperator(6, a) * QubitOperator(6, b);
      const Eigen::MatrixXcd dense =
          QubitOperator(6, a).to_matrix() * QubitOperator(6, b).to_matrix();
      CHECK((lhs.to_matrix() - dense).norm() < 1e-12);
      CHECK(a.commutes_with(b) == ((lhs - QubitOperator(6, b) * QubitOperator(6, a)).prune().empty()));
    }
  }

  SECTION("parse and print") {
    const auto s = PauliString::parse("X0 Y3 Z5");
    CHECK(s.op(0) == PauliOp::X);
    CHECK(s.op(3) == PauliOp::Y);
    CHECK(s.op(5) == PauliOp::Z);
    CHECK(s.op(1) == PauliOp::I);
    CHECK(s.weight() == 3);
    CHECK(s.to_string() == "X0 Y3 Z5");
    CHECK(PauliString::parse("I").is_identity());
  }

  SECTION("text serialization round-trips") {
    const auto op = parse_op("+0.5 Z0 Z1\n-0.25 X0 X1\n+1.5 I\n(0.1,-0.2) Y2\n", 3);
    CHECK(op.size() == 4);
    CHECK(op.constant() == Complex(1.5, 0));
    const auto back = QubitOperator::from_text(op.to_text(), 3);
    CHECK(back.to_text() == op.to_text());
    CHECK(max_abs_coefficient(back - op) < 1e-15);
  }

  SECTION("prune removes tiny terms") {
    QubitOperator op(2);
    op.add(PauliString::parse("Z0"), 1e-13);
    op.add(PauliString::parse("Z1"), 0.3);
    op.prune();
    CHECK(op.size() == 1);
  }
}

TEST_CASE("fermion operator basics", "[qubitmap]") {
  SECTION("one orbital with no interaction is eps times the number operator") {
    SpatialHamiltonian ham{0.0, Eigen::MatrixXd::Constant(1, 1, -0.7), Eri(1)};
    const auto f = fermion_hamiltonian(ham);
    const auto expected = (FermionOperator::number(0) + FermionOperator::number(1)) * -0.7;
    CHECK((f - expected).normal_ordered().size() == 0);
    const auto q = jordan_wigner(f, 2);
    CHECK(q.constant().real() == Approx(-0.7));
    CHECK(q.coefficient(PauliString::parse("Z0")).real() == Approx(0.35));
    CHECK(q.coefficient(PauliString::parse("Z1")).real() == Approx(0.35));
    CHECK(q.size() == 3);
  }

  SECTION("hamiltonian is hermitian") {
    const auto ham = random_hamiltonian(3, 11);
    const auto f = fermion_hamiltonian(ham);
    CHECK((f - f.adjoint()).normal_ordered().size() == 0);
    const auto q = qubit_hamiltonian(ham);
    CHECK(q.is_hermitian());
    CHECK(q.max_imaginary() < 1e-12);
  }

  SECTION("normal ordering applies the anticommutator") {
    const auto prod = FermionOperator::annihilation(2) * FermionOperator::creation(2);
    const auto expected = FermionOperator::constant(1.0) - FermionOperator::number(2);
    CHECK((prod - expected).normal_ordered().size() == 0);
  }
}

TEST_CASE("Jordan-Wigner textbook identities", "[qubitmap]") {
  const auto n0 = jordan_wigner(FermionOperator::number(0), 2);
  CHECK(max_abs_coefficient(n0 - parse_op("+0.5 I\n-0.5 Z0\n", 2)) < 1e-15);

  const auto hop = FermionOperator::creation(0) * FermionOperator::annihilation(1) +
                   FermionOperator::creation(1) * FermionOperator::annihilation(0);
  const auto q = jordan_wigner(hop, 2);
  CHECK(max_abs_coefficient(q - parse_op("+0.5 X0 X1\n+0.5 Y0 Y1\n", 2)) < 1e-15);

  SECTION("creation operator carries the parity tail") {
    const auto a2 = jordan_wigner(FermionOperator::creation(2), 3);
    CHECK(a2.coefficient(PauliString::parse("Z0 Z1 X2")) == Complex(0.5, 0));
    CHECK(a2.coefficient(PauliString::parse("Z0 Z1 Y2")) == Complex(0, -0.5));
  }

  SECTION("anticommutation relations survive the mapping") {
    const int n = 5;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const auto ai = jordan_wigner(FermionOperator::annihilation(i), n);
        const auto aj_dag = jordan_wigner(FermionOperator::creation(j), n);
        const auto aj = jordan_wigner(FermionOperator::annihilation(j), n);
        auto anti = ai * aj_dag + aj_dag * ai;
        anti.prune();
        if (i == j) {
          CHECK(anti.size() == 1);
          CHECK(anti.constant() == Complex(1, 0));
        } else {
          CHECK(anti.empty());
        }
        auto aa = ai * aj + aj * ai;
        CHECK(aa.prune().empty());
      }
  }
}

TEST_CASE("qubit spectra match the Fock-space oracle", "[qubitmap]") {
  SECTION("H2 at 0.74 A, 16x16") {
    const auto ham = lowdin_hamiltonian(test_support::hydrogen_chain(2, 0.74));
    const auto q = qubit_hamiltonian(ham);
    CHECK(q.n_qubits() == 4);
    const Eigen::MatrixXcd m = q.to_matrix();
    CHECK(m.rows() == 16);
    const auto got = sorted_eigenvalues(m);
    const auto want = oracle_spectrum(ham);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(got(0) == Approx(solve_fci(ham, 1, 1, false).energy).margin(1e-8));
    CHECK(got(0) == Approx(-1.137).margin(1e-3));
  }

  SECTION("H2 through an embedding problem") {
    const auto mol = test_support::hydrogen_chain(2, 0.74);
    const auto basis = build_basis(mol, "sto-3g");
    const auto ints = compute_integrals(mol, basis);
    const auto scf = run_rhf(ints, 2);
    const auto plan = define_fragments(mol, basis, {{0}, {1}},
                                       {SolverKind::ExactDiagonalization, SolverKind::MeanField});
    const auto sys = prepare_dmet(ints, scf, plan, 2);
    const auto& prob = sys.problems[0];
    const auto q = jordan_wigner(fermion_hamiltonian(prob), 4);
    const auto got = sorted_eigenvalues(q.to_matrix());
    const auto want = oracle_spectrum(prob.hamiltonian());
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
  }

  SECTION("random operators up to five spatial orbitals") {
    for (int n = 1; n <= 5; ++n) {
      const auto ham = random_hamiltonian(n, 100 + n);
      const auto got = sorted_eigenvalues(qubit_hamiltonian(ham).to_matrix());
      const auto want = oracle_spectrum(ham);
      INFO("n = " << n);
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
    }
  }

  SECTION("H4 chain, 256x256") {
    const auto ham = lowdin_hamiltonian(test_support::hydrogen_chain(4, 1.0));
    const auto got = sorted_eigenvalues(qubit_hamiltonian(ham).to_matrix());
    const auto want = oracle_spectrum(ham);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("qubit-wise commuting partition", "[qubitmap]") {
  SECTION("all diagonal terms share one group") {
    const auto groups = partition_commuting(parse_op("+1 Z0\n+1 Z1\n+1 Z0 Z1\n", 2));
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].terms.size() == 3);
    CHECK(groups[0].basis == std::vector<PauliOp>{PauliOp::Z, PauliOp::Z});
  }

  SECTION("anticommuting terms split") {
    CHECK(partition_commuting(parse_op("+1 X0\n+1 Z0\n", 1)).size() == 2);
  }

  SECTION("identity is left out") {
    const auto groups = partition_commuting(parse_op("+2 I\n+1 Z0\n", 1));
    REQUIRE(groups.size() == 1);
    CHECK(groups[0].terms.size() == 1);
  }

  const auto ham = mo_hamiltonian(test_support::hydrogen_chain(2, 0.74));
  const auto q = qubit_hamiltonian(ham);
  const auto syms = find_z2_symmetries(q, 1, 1);
  const auto groups = partition_commuting(q, syms);

  SECTION("H2 needs at most five settings and the union is exact") {
    CHECK(groups.size() <= 5);
    QubitOperator sum = QubitOperator::identity(4, q.constant());
    for (const auto& g : groups) {
      CHECK(all_qwc(g));
      for (const auto& [p, c] : g.terms) {
        CHECK(g.accepts(p));
        sum.add(p, c);
      }
      for (const auto& s : g.symmetries) CHECK(g.accepts(s.string));
    }
    CHECK(max_abs_coefficient(sum - q) == 0.0);
    std::size_t members = 0;
    for (const auto& g : groups) members += g.terms.size();
    CHECK(members + 1 == q.size());
  }

  SECTION("grouped probabilities reconstruct the statevector expectation") {
    for (double theta : {0.0, 0.3, -1.1, 2.5}) {
      const auto circ = build_yxxx_ansatz(theta);
      const Eigen::VectorXcd psi = simulate_statevector(circ);
      std::vector<Distribution> dists;
      for (const auto& g : groups) {
        Eigen::VectorXcd rotated = psi;
        const auto rotation = measurement_rotation(g.basis);
        for (const auto& gate : rotation.gates()) apply_gate(rotated, gate);
        Distribution d{4, {}, 0.0};
        for (Eigen::Index i = 0; i < rotated.size(); ++i) d.probs.push_back(std::norm(rotated(i)));
        dists.push_back(d);
      }
      const double grouped = expectation_from_distributions(dists, groups, q.constant().real());
      const double direct = (psi.adjoint() * q.to_matrix() * psi)(0).real();
      CHECK(grouped == Approx(direct).margin(1e-10));
    }
  }

  SECTION("ordering is deterministic") {
    const auto again = partition_commuting(q, syms);
    REQUIRE(again.size() == groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i) {
      CHECK(again[i].basis == groups[i].basis);
      CHECK(again[i].terms == groups[i].terms);
    }
  }
}

TEST_CASE("Z2 symmetries", "[qubitmap]") {
  const auto ham = lowdin_hamiltonian(test_support::hydrogen_chain(2, 0.74));
  const auto q = qubit_hamiltonian(ham);
  const auto syms = find_z2_symmetries(q, 1, 1);
  REQUIRE(syms.size() == 3);
  CHECK(syms[0].string == PauliString::parse("Z0 Z2"));
  CHECK(syms[0].eigenvalue == -1);
  CHECK(syms[1].string == PauliString::parse("Z1 Z3"));
  CHECK(syms[1].eigenvalue == -1);
  CHECK(syms[2].string == PauliString::parse("Z0 Z1 Z2 Z3"));
  CHECK(syms[2].eigenvalue == 1);

  SECTION("every symmetry commutes with every term") {
    for (const auto& s : syms)
      for (const auto& [p, c] : q.terms()) CHECK(s.string.commutes_with(p));
  }

  SECTION("reference bitstring sits in the recorded sector") {
    const std::uint64_t reference = 0b0011;
    for (const auto& s : syms) CHECK(eigenvalue(reference, s.string.z_mask()) == s.eigenvalue);
  }

  SECTION("larger registers follow the same pattern") {
    const auto h4 = qubit_hamiltonian(lowdin_hamiltonian(test_support::hydrogen_chain(4, 1.0)));
    const auto s4 = find_z2_symmetries(h4, 2, 2);
    REQUIRE(s4.size() == 3);
    CHECK(s4[0].string == PauliString::parse("Z0 Z2 Z4 Z6"));
    CHECK(s4[0].eigenvalue == 1);
    CHECK(eigenvalue(0b1111, s4[2].string.z_mask()) == s4[2].eigenvalue);
  }

  SECTION("non-commuting candidates are dropped") {
    const auto broken = parse_op("+1 X0\n+1 Z1 Z3\n", 4);
    const auto kept = find_z2_symmetries(broken, 1, 1);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].label == "beta-parity");
  }
}
