#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "qembed/basis.hpp"
#include "qembed/dmet.hpp"
#include "qembed/error.hpp"
#include "qembed/fci.hpp"
#include "qembed/integrals.hpp"
#include "qembed/mitigation.hpp"
#include "qembed/scf.hpp"
#include "qembed/vqe.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace qembed;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct H2 {
  SpatialHamiltonian ham;
  double e_hf = 0.0;
  double e_fci = 0.0;
  VqeProblem prob;
};

H2 make_h2(double r = 0.74) {
  const auto mol = test_support::hydrogen_chain(2, r);
  const auto basis = build_basis(mol, "sto-3g");
  const auto ints = compute_integrals(mol, basis);
  const auto scf = run_rhf(ints, 2);
  H2 h;
  h.ham = {ints.e_nuc, scf.mo_coeffs.transpose() * ints.h_core * scf.mo_coeffs,
           transform(ints.eri, scf.mo_coeffs)};
  h.e_hf = scf.e_total;
  h.e_fci = solve_fci(h.ham, 1, 1, false).energy;
  h.prob = make_vqe_problem(qubit_hamiltonian(h.ham), 1, 1);
  return h;
}

const AnsatzBuilder kYxxx = [](double theta) { return build_yxxx_ansatz(theta); };

VqeConfig statevector_cfg() {
  VqeConfig cfg;
  cfg.backend = Backend::Statevector;
  return cfg;
}

VqeConfig shots_cfg(std::uint64_t seed) {
  VqeConfig cfg;
  cfg.backend = Backend::Shots;
  cfg.seed = seed;
  cfg.theta_source = ThetaSource::Statevector;
  return cfg;
}

ShotTable table_of(int n, std::vector<std::pair<std::uint64_t, std::int64_t>> entries) {
  ShotTable t;
  t.n_qubits = n;
  t.basis.assign(static_cast<std::size_t>(n), PauliOp::Z);
  for (auto [bits, c] : entries) t.record(bits, c);
  t.n_requested = t.n_recorded;
  return t;
}

Eigen::MatrixXd flip_matrix(double p, int n) {
  Eigen::MatrixXd one(2, 2);
  one << 1 - p, p, p, 1 - p;
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd next(m.rows() * 2, m.cols() * 2);
    // Qubit k is the most significant bit of the growing register.
    for (Eigen::Index a = 0; a < 2; ++a)
      for (Eigen::Index b = 0; b < 2; ++b)
        next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = one(a, b) * m;
    m = next;
  }
  return m;
}

Symmetry total_parity(int eigen = 1) { return {PauliString::parse("Z0 Z1 Z2 Z3"), eigen, "parity"}; }

}  // namespace

TEST_CASE("VQE configuration", "[vqe]") {
  VqeConfig cfg;
  CHECK(cfg.shots_per_iteration == 6000);
  CHECK(cfg.final_shots == 60000);
  CHECK(cfg.n_blocks == 10);
  CHECK(cfg.optimizer == Optimizer::Rotosolve);
  CHECK_NOTHROW(cfg.validate());
  cfg.final_shots = 60001;
  CHECK_THROWS_AS(cfg.validate(), Error);
  CHECK(optimizer_from_string("golden-section") == Optimizer::GoldenSection);
  CHECK(backend_from_string("shots+noise") == Backend::NoisyShots);
  CHECK(to_string(Backend::NoisyShots) == "shots+noise");
  CHECK_THROWS_AS(backend_from_string("qpu"), Error);
}

TEST_CASE("symmetry verification", "[vqe]") {
  SECTION("odd-parity outcomes are discarded") {
    const auto t = table_of(4, {{0b1100, 900}, {0b1000, 100}});
    const auto f = pmsv_filter(t, {total_parity()});
    CHECK(f.n_recorded == 900);
    CHECK(f.counts.count(0b1000) == 0);
    CHECK(f.survival_fraction() == Approx(0.9));
  }

  SECTION("noiseless two-electron state survives completely") {
    const auto t = sample_shots(build_yxxx_ansatz(0.6), {}, 20000, std::nullopt, 1);
    CHECK(pmsv_filter(t, {total_parity()}).survival_fraction() == 1.0);
  }

  SECTION("nothing left is starvation") {
    const auto t = table_of(4, {{0b0001, 10}});
    CHECK_THROWS_AS(pmsv_filter(t, {total_parity()}), StarvationError);
  }

  SECTION("symmetry must be diagonal in the basis") {
    auto t = table_of(4, {{0b0011, 10}});
    t.basis[0] = PauliOp::X;
    CHECK_THROWS_AS(pmsv_filter(t, {total_parity()}), Error);
  }

  SECTION("survival under readout flips follows the even-flip probability") {
    const double p = 0.02;
    const double expected = 0.5 * (1 + std::pow(1 - 2 * p, 4));
    CHECK(expected == Approx(0.9246).margin(1e-4));
    const std::int64_t n = 100000;
    Circuit ref(4);
    ref.x(0).x(1);
    const auto t = sample_shots(ref, {}, n, NoiseModel::readout_only(p, p), 17);
    const double got = pmsv_filter(t, {total_parity()}).survival_fraction();
    CHECK(std::abs(got - expected) < 5 * std::sqrt(expected * (1 - expected) / n));
  }

  SECTION("distribution form renormalizes") {
    Distribution d{2, {0.4, 0.1, 0.2, 0.3}, 100};
    double kept = 0.0;
    const auto f = pmsv_filter(d, {PauliOp::Z, PauliOp::Z},
                               {{PauliString::parse("Z0 Z1"), 1, "p"}}, &kept);
    CHECK(kept == Approx(0.7));
    CHECK(f.probs[0] == Approx(0.4 / 0.7));
    CHECK(f.probs[1] == 0.0);
  }
}

TEST_CASE("SPAM calibration and correction", "[vqe]") {
  SECTION("noiseless backend gives the identity") {
    const auto prof = spam_calibrate(std::nullopt, 4, 1000, 2);
    CHECK((prof.transfer - Eigen::MatrixXd::Identity(16, 16)).norm() == 0.0);
    CHECK(prof.condition_number == Approx(1.0));
  }

  const double p = 0.05;
  const std::int64_t shots = 40000;
  const auto prof = spam_calibrate(NoiseModel::readout_only(p, p), 4, shots, 3);

  SECTION("readout noise reproduces the tensor power of the flip matrix") {
    CHECK(prof.transfer.rows() == 16);
    const auto want = flip_matrix(p, 4);
    for (Eigen::Index i = 0; i < 16; ++i)
      for (Eigen::Index j = 0; j < 16; ++j) {
        const double w = want(i, j);
        const double sigma = std::sqrt(std::max(w * (1 - w), 1e-12) / shots);
        CHECK(std::abs(prof.transfer(i, j) - w) < 5 * sigma + 1e-12);
      }
    for (Eigen::Index j = 0; j < 16; ++j) CHECK(prof.transfer.col(j).sum() == Approx(1.0));
    CHECK(prof.condition_number > 1.0);
  }

  SECTION("profile applied to its own calibration columns recovers deltas") {
    for (Eigen::Index j = 0; j < 16; ++j) {
      Distribution d{4, {}, static_cast<double>(shots)};
      for (Eigen::Index i = 0; i < 16; ++i) d.probs.push_back(prof.transfer(i, j));
      const auto c = spam_correct(d, prof);
      CHECK(c.probs[static_cast<std::size_t>(j)] == Approx(1.0).margin(1e-10));
    }
  }

  SECTION("identity profile leaves distributions alone") {
    const auto ident = spam_profile(Eigen::MatrixXd::Identity(4, 4));
    Distribution d{2, {0.1, 0.2, 0.3, 0.4}, 10};
    const auto c = spam_correct(d, ident);
    for (std::size_t i = 0; i < 4; ++i) CHECK(c.probs[i] == Approx(d.probs[i]));
  }

  SECTION("noisy zero state is pushed back toward the delta") {
    const auto t = sample_shots(Circuit(4), {}, 60000, NoiseModel::readout_only(p, p), 4);
    const double raw = to_distribution(t).probs[0];
    const double fixed = spam_correct(t, prof).probs[0];
    CHECK(fixed >= raw);
    CHECK(fixed == Approx(1.0).margin(0.01));
  }

  SECTION("clipping keeps a valid distribution") {
    const auto t = table_of(4, {{0b0001, 1}, {0b0110, 2}});
    const auto c = spam_correct(t, prof);
    double total = 0.0;
    for (double v : c.probs) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == Approx(1.0));
  }

  SECTION("dimension mismatch") {
    Distribution d{2, {1, 0, 0, 0}, 1};
    CHECK_THROWS_AS(spam_correct(d, prof), Error);
  }

  SECTION("singular transfer falls back to the pseudo-inverse") {
    Eigen::MatrixXd m(2, 2);
    m << 0.5, 0.5, 0.5, 0.5;
    const auto s = spam_profile(m);
    CHECK(s.pseudo_inverse);
    Distribution d{1, {0.5, 0.5}, 1};
    const auto c = spam_correct(d, s);
    CHECK(c.probs[0] + c.probs[1] == Approx(1.0));
  }
}

TEST_CASE("statevector VQE on H2", "[vqe]") {
  const auto h2 = make_h2();

  SECTION("matches the active-space FCI") {
    const auto est = vqe_minimize(h2.prob, kYxxx, statevector_cfg());
    CHECK(est.mean == Approx(h2.e_fci).margin(1e-8));
    CHECK(est.mean >= h2.e_fci - 1e-8);
    CHECK(est.mean <= h2.e_hf + 1e-8);
    const double grad = 0.5 * (statevector_energy(h2.prob, kYxxx(est.theta_star + kPi / 2)) -
                               statevector_energy(h2.prob, kYxxx(est.theta_star - kPi / 2)));
    CHECK(std::abs(grad) < 1e-8);
    CHECK(correlation_energy(est, h2.e_hf) <= 0.0);
    CHECK(est.std == 0.0);

    SECTION("restarting at the optimum returns immediately") {
      auto cfg = statevector_cfg();
      cfg.theta0 = est.theta_star;
      const auto again = vqe_minimize(h2.prob, kYxxx, cfg);
      CHECK(again.trace.size() == 3);
      CHECK(again.mean == Approx(est.mean).margin(1e-12));
    }
  }

  SECTION("other bond lengths and optimizers") {
    for (double r : {0.5, 1.2, 2.0}) {
      const auto h = make_h2(r);
      const auto est = vqe_minimize(h.prob, kYxxx, statevector_cfg());
      CHECK(est.mean == Approx(h.e_fci).margin(1e-8));
      auto golden = statevector_cfg();
      golden.optimizer = Optimizer::GoldenSection;
      CHECK(vqe_minimize(h.prob, kYxxx, golden).mean == Approx(h.e_fci).margin(1e-8));
      auto scan = statevector_cfg();
      scan.optimizer = Optimizer::Scan;
      CHECK(vqe_minimize(h.prob, kYxxx, scan).mean == Approx(h.e_fci).margin(1e-4));
    }
  }

  SECTION("zero coupling gives zero correlation") {
    Eigen::MatrixXd h(2, 2);
    h << -1.0, 0.0, 0.0, 1.0;
    const SpatialHamiltonian diag{0.0, h, Eri(2)};
    const auto prob = make_vqe_problem(qubit_hamiltonian(diag), 1, 1);
    const auto est = vqe_minimize(prob, kYxxx, statevector_cfg());
    CHECK(correlation_energy(est, -2.0) == Approx(0.0).margin(1e-12));
  }

  SECTION("problem carries symmetries on every diagonal group") {
    CHECK(h2.prob.symmetries.size() == 3);
    CHECK(h2.prob.constant == Approx(qubit_hamiltonian(h2.ham).constant().real()));
    bool any = false;
    for (const auto& g : h2.prob.groups) any = any || !g.symmetries.empty();
    CHECK(any);
  }
}

TEST_CASE("VQE reduced density matrices", "[vqe]") {
  const auto h2 = make_h2();
  const auto cfg = statevector_cfg();

  SECTION("reference occupations at theta = 0") {
    const auto [d1, d2] = rdms_from_vqe(0.0, kYxxx, 2, 1, 1, cfg);
    CHECK(d1(0, 0) == Approx(2.0));
    CHECK(d1(1, 1) == Approx(0.0).margin(1e-14));
    CHECK(d1(0, 1) == Approx(0.0).margin(1e-14));
    CHECK(d2(0, 0, 0, 0) == Approx(2.0));
  }

  SECTION("trace and partial trace") {
    for (double theta : {-1.3, -0.4, 0.2, 0.9, 2.4}) {
      const auto [d1, d2] = rdms_from_vqe(theta, kYxxx, 2, 1, 1, cfg);
      CHECK(d1.trace() == Approx(2.0).margin(1e-12));
      for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) {
          double t = 0.0;
          for (std::size_t r = 0; r < 2; ++r) t += d2(p, q, r, r);
          CHECK(t == Approx(d1(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)))
                         .margin(1e-12));
        }
      CHECK(energy_from_rdms(h2.ham, d1, d2) ==
            Approx(statevector_energy(h2.prob, kYxxx(theta))).margin(1e-12));
    }
  }

  SECTION("optimum reproduces the FCI density matrices") {
    const auto est = vqe_minimize(h2.prob, kYxxx, cfg);
    const auto [d1, d2] = rdms_from_vqe(est.theta_star, kYxxx, 2, 1, 1, cfg);
    const auto fci = solve_fci(h2.ham, 1, 1);
    CHECK((d1 - fci.rdm1).cwiseAbs().maxCoeff() < 1e-7);
  }

  SECTION("shot estimates stay close") {
    const auto [d1, d2] = rdms_from_vqe(-0.22, kYxxx, 2, 1, 1, shots_cfg(9));
    const auto [e1, e2] = rdms_from_vqe(-0.22, kYxxx, 2, 1, 1, cfg);
    CHECK(d1.trace() == Approx(2.0).margin(0.02));
    CHECK((d1 - e1).cwiseAbs().maxCoeff() < 0.02);
  }
}

TEST_CASE("shot-based VQE", "[vqe]") {
  const auto h2 = make_h2();

  SECTION("noiseless 60000 shots within the 0.002 Ha budget") {
    const auto est = vqe_minimize(h2.prob, kYxxx, shots_cfg(31));
    CHECK(est.n_blocks == 10);
    CHECK(est.block_energies.size() == 10);
    CHECK(std::abs(est.mean - h2.e_fci) < 0.002);
    CHECK(est.std > 0.0);
    CHECK(est.survival_fraction == 1.0);
  }

  SECTION("optimizing on shots still lands near the optimum") {
    auto cfg = shots_cfg(12);
    cfg.theta_source = ThetaSource::Backend;
    const auto est = vqe_minimize(h2.prob, kYxxx, cfg);
    CHECK(std::abs(est.mean - h2.e_fci) < 0.01);
  }

  SECTION("block spread scales as N^-1/2") {
    std::vector<double> log_n, log_s;
    for (std::int64_t n : {6000, 60000, 600000}) {
      double s = 0.0;
      const int reps = 12;
      for (int k = 0; k < reps; ++k) {
        auto cfg = shots_cfg(200 + static_cast<std::uint64_t>(k));
        cfg.final_shots = n;
        s += vqe_minimize(h2.prob, kYxxx, cfg).std;
      }
      log_n.push_back(std::log(static_cast<double>(n)));
      log_s.push_back(std::log(s / reps));
    }
    const double slope = (log_s[2] - log_s[0]) / (log_n[2] - log_n[0]);
    CHECK(std::abs(slope + 0.5) < 0.1);
  }

  SECTION("same seed, same estimate") {
    auto cfg = shots_cfg(5);
    cfg.backend = Backend::NoisyShots;
    cfg.final_shots = 6000;
    cfg.spam_shots_per_state = 2000;
    const auto a = vqe_minimize(h2.prob, kYxxx, cfg);
    const auto b = vqe_minimize(h2.prob, kYxxx, cfg);
    CHECK(a.block_energies == b.block_energies);
    CHECK(a.survival_fraction < 1.0);
  }
}

TEST_CASE("mitigation comparison", "[vqe]") {
  const auto h2 = make_h2();
  const auto theta = vqe_minimize(h2.prob, kYxxx, statevector_cfg()).theta_star;
  const auto circ = kYxxx(theta);
  const auto noise = NoiseModel::preset("nisq-2021");
  const auto spam = spam_calibrate(noise, 4, 20000, 77);
  int improved = 0;
  double order_gap = 0.0;
  const int trials = 20;
  for (int k = 0; k < trials; ++k) {
    const auto m = compare_mitigation(h2.prob, circ, noise, 6000, 1000 + static_cast<std::uint64_t>(k), spam);
    CHECK(m.statevector == Approx(h2.e_fci).margin(1e-8));
    if (std::abs(m.pmsv - m.statevector) < std::abs(m.raw - m.statevector)) ++improved;
    order_gap += std::abs(m.pmsv_spam - m.spam_pmsv);
    CHECK(m.survival_fraction < 1.0);
    CHECK(m.survival_fraction > 0.8);
  }
  CHECK(improved >= 18);
  CHECK(order_gap > 0.0);
}

TEST_CASE("VQE as a DMET fragment solver", "[vqe]") {
  const auto mol = test_support::hydrogen_chain(2, 0.74);
  const auto basis = build_basis(mol, "sto-3g");
  const auto ints = compute_integrals(mol, basis);
  const auto scf = run_rhf(ints, 2);
  const auto plan = define_fragments(mol, basis, {{0}, {1}}, {SolverKind::Vqe, SolverKind::Vqe});
  const auto sys = prepare_dmet(ints, scf, plan, 2);
  const auto solver = vqe_fragment_solver(statevector_cfg(), ActiveSpace{});
  const auto r = run_dmet(sys, {solver, solver});
  const auto h2 = make_h2();
  CHECK(r.e_total == Approx(h2.e_fci).margin(1e-7));
  for (const auto& f : r.fragments) {
    CHECK(f.e_corr <= 0.0);
    CHECK(f.n_elec_on_fragment == Approx(1.0).margin(1e-6));
  }
}
