#include "qembed/vqe.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "qembed/error.hpp"

namespace qembed {

namespace {

constexpr double kPi = std::numbers::pi;

// Stream tags for derive_seed.
constexpr std::uint64_t kIterationStream = 1;
constexpr std::uint64_t kFinalStream = 2;
constexpr std::uint64_t kSpamStream = 3;
constexpr std::uint64_t kRdmStream = 4;

double wrap_angle(double t) {
  t = std::remainder(t, 2.0 * kPi);
  return t <= -kPi ? t + 2.0 * kPi : t;
}

}  // namespace

std::string to_string(Optimizer o) {
  switch (o) {
    case Optimizer::Rotosolve: return "rotosolve";
    case Optimizer::GoldenSection: return "golden-section";
    case Optimizer::Scan: return "scan";
  }
  return "?";
}

std::string to_string(Backend b) {
  switch (b) {
    case Backend::Statevector: return "statevector";
    case Backend::Shots: return "shots";
    case Backend::NoisyShots: return "shots+noise";
  }
  return "?";
}

Optimizer optimizer_from_string(const std::string& s) {
  if (s == "rotosolve") return Optimizer::Rotosolve;
  if (s == "golden-section") return Optimizer::GoldenSection;
  if (s == "scan") return Optimizer::Scan;
  throw Error("unknown optimizer '" + s + "' (expected rotosolve, golden-section or scan)");
}

Backend backend_from_string(const std::string& s) {
  if (s == "statevector") return Backend::Statevector;
  if (s == "shots") return Backend::Shots;
  if (s == "shots+noise") return Backend::NoisyShots;
  throw Error("unknown backend '" + s + "' (expected statevector, shots or shots+noise)");
}

void VqeConfig::validate() const {
  if (n_blocks < 1) throw Error("n_blocks must be at least 1");
  if (final_shots <= 0 || shots_per_iteration <= 0) throw Error("shot counts must be positive");
  if (final_shots % n_blocks != 0)
    throw Error("final_shots (" + std::to_string(final_shots) + ") not divisible by n_blocks (" +
                std::to_string(n_blocks) + ")");
  if (spam_shots_per_state <= 0) throw Error("spam_shots_per_state must be positive");
  if (scan_points < 8) throw Error("scan_points must be at least 8");
  noise.validate();
}

std::optional<NoiseModel> VqeConfig::noise_model() const {
  if (backend == Backend::NoisyShots) return noise;
  return std::nullopt;
}

VqeProblem make_vqe_problem(const QubitOperator& hamiltonian, int n_alpha, int n_beta) {
  if (!hamiltonian.is_hermitian())
    throw Error("VQE Hamiltonian has complex coefficients (max imaginary part " +
                std::to_string(hamiltonian.max_imaginary()) + ")");
  VqeProblem p;
  p.hamiltonian = hamiltonian;
  p.symmetries = find_z2_symmetries(hamiltonian, n_alpha, n_beta);
  p.groups = partition_commuting(hamiltonian, p.symmetries);
  p.constant = hamiltonian.constant().real();
  return p;
}

namespace {

// Mitigated distribution for one group's shot table.
Distribution mitigate(const ShotTable& table, const MeasurementGroup& group, const VqeConfig& cfg,
                      const SpamProfile* spam, std::int64_t* kept) {
  const bool pmsv = cfg.pmsv && !group.symmetries.empty();
  const bool use_spam = cfg.spam && spam != nullptr;
  if (!pmsv) {
    *kept = table.n_recorded;
    return use_spam ? spam_correct(table, *spam) : to_distribution(table);
  }
  if (!use_spam || cfg.order == MitigationOrder::PmsvThenSpam) {
    const auto filtered = pmsv_filter(table, group.symmetries);
    *kept = filtered.n_recorded;
    return use_spam ? spam_correct(filtered, *spam) : to_distribution(filtered);
  }
  double mass = 1.0;
  auto d = pmsv_filter(spam_correct(table, *spam), group.basis, group.symmetries, &mass);
  *kept = static_cast<std::int64_t>(std::llround(mass * static_cast<double>(table.n_recorded)));
  return d;
}

std::vector<Distribution> measured_distributions(const std::vector<MeasurementGroup>& groups,
                                                 const Circuit& circ, const VqeConfig& cfg,
                                                 std::int64_t shots, std::uint64_t seed,
                                                 const SpamProfile* spam, double* survival) {
  const auto noise = cfg.noise_model();
  std::vector<Distribution> dists;
  std::int64_t requested = 0, kept_total = 0;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto table = sample_shots(circ, groups[g], shots, noise, derive_seed(seed, {g}));
    std::int64_t kept = 0;
    dists.push_back(mitigate(table, groups[g], cfg, spam, &kept));
    if (cfg.pmsv && !groups[g].symmetries.empty()) {
      requested += table.n_recorded;
      kept_total += kept;
    }
  }
  if (survival)
    *survival = requested > 0 ? static_cast<double>(kept_total) / static_cast<double>(requested)
                              : 1.0;
  return dists;
}

}  // namespace

double shot_energy(const VqeProblem& prob, const Circuit& circ, const VqeConfig& cfg,
                   std::int64_t shots, std::uint64_t seed, const SpamProfile* spam,
                   double* survival) {
  const auto dists = measured_distributions(prob.groups, circ, cfg, shots, seed, spam, survival);
  return expectation_from_distributions(dists, prob.groups, prob.constant);
}

double statevector_energy(const VqeProblem& prob, const Circuit& circ) {
  return expectation(prob.hamiltonian, simulate_statevector(circ)).real();
}

namespace {

SpamProfile calibrate_for(const VqeConfig& cfg, int n_qubits) {
  return spam_calibrate(cfg.noise_model(), n_qubits, cfg.spam_shots_per_state,
                        derive_seed(cfg.seed, {kSpamStream}));
}

std::string format_trace(const std::vector<std::pair<double, double>>& trace) {
  std::ostringstream out;
  out.precision(12);
  for (auto [t, e] : trace) out << " (" << t << ", " << e << ")";
  return out.str();
}

}  // namespace

EnergyEstimate vqe_minimize(const VqeProblem& prob, const AnsatzBuilder& ansatz,
                            const VqeConfig& cfg) {
  cfg.validate();
  const int n_qubits = prob.hamiltonian.n_qubits();
  std::optional<SpamProfile> spam;
  if (cfg.uses_shots() && cfg.spam) spam = calibrate_for(cfg, n_qubits);
  const SpamProfile* spam_ptr = spam ? &*spam : nullptr;

  EnergyEstimate est;
  const bool exact = !cfg.uses_shots() || cfg.theta_source == ThetaSource::Statevector;
  std::uint64_t n_eval = 0;
  auto energy = [&](double theta) {
    const Circuit c = ansatz(theta);
    const double e = exact ? statevector_energy(prob, c)
                           : shot_energy(prob, c, cfg, cfg.shots_per_iteration,
                                         derive_seed(cfg.seed, {kIterationStream, n_eval}),
                                         spam_ptr);
    ++n_eval;
    est.trace.emplace_back(theta, e);
    return e;
  };

  double theta = wrap_angle(cfg.theta0);
  switch (cfg.optimizer) {
    case Optimizer::Rotosolve: {
      const int sweeps = exact ? cfg.max_sweeps : cfg.max_noisy_sweeps;
      bool converged = false;
      for (int s = 0; s < sweeps; ++s) {
        const double e0 = energy(theta);
        const double ep = energy(theta + kPi / 2);
        const double em = energy(theta - kPi / 2);
        const double next = wrap_angle(theta - kPi / 2 - std::atan2(2 * e0 - ep - em, ep - em));
        const double step = std::abs(wrap_angle(next - theta));
        theta = next;
        if (step < cfg.theta_tol) {
          converged = true;
          break;
        }
      }
      if (exact && !converged)
        throw ConvergenceError("rotosolve did not converge; trace:" + format_trace(est.trace),
                               theta, 0.0);
      break;
    }
    case Optimizer::GoldenSection: {
      constexpr int kCoarse = 8;
      double best = theta, best_e = energy(theta);
      for (int k = 1; k < kCoarse; ++k) {
        const double t = wrap_angle(theta + 2 * kPi * k / kCoarse);
        const double e = energy(t);
        if (e < best_e) best_e = e, best = t;
      }
      const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = best - 2 * kPi / kCoarse, b = best + 2 * kPi / kCoarse;
      double c = b - ratio * (b - a), d = a + ratio * (b - a);
      double fc = energy(c), fd = energy(d);
      const int max_iter = exact ? 200 : 40;
      for (int it = 0; it < max_iter && b - a > 1e-10; ++it) {
        if (fc < fd) {
          b = d, d = c, fd = fc;
          c = b - ratio * (b - a), fc = energy(c);
        } else {
          a = c, c = d, fc = fd;
          d = a + ratio * (b - a), fd = energy(d);
        }
      }
      theta = wrap_angle(0.5 * (a + b));
      break;
    }
    case Optimizer::Scan: {
      double best_e = std::numeric_limits<double>::infinity();
      for (int k = 0; k < cfg.scan_points; ++k) {
        const double t = -kPi + 2 * kPi * k / cfg.scan_points;
        const double e = energy(t);
        if (e < best_e) best_e = e, theta = t;
      }
      break;
    }
  }
  est.theta_star = theta;

  const Circuit final_circ = ansatz(theta);
  if (!cfg.uses_shots()) {
    est.mean = statevector_energy(prob, final_circ);
    est.block_energies = {est.mean};
    return est;
  }
  const std::int64_t per_block = cfg.final_shots / cfg.n_blocks;
  double survival_sum = 0.0;
  for (int b = 0; b < cfg.n_blocks; ++b) {
    double survival = 1.0;
    est.block_energies.push_back(shot_energy(prob, final_circ, cfg, per_block,
                                             derive_seed(cfg.seed, {kFinalStream,
                                                                    static_cast<std::uint64_t>(b)}),
                                             spam_ptr, &survival));
    survival_sum += survival;
  }
  est.n_blocks = cfg.n_blocks;
  est.survival_fraction = survival_sum / cfg.n_blocks;
  const double n = static_cast<double>(cfg.n_blocks);
  est.mean = std::accumulate(est.block_energies.begin(), est.block_energies.end(), 0.0) / n;
  if (cfg.n_blocks > 1) {
    double ss = 0.0;
    for (double e : est.block_energies) ss += (e - est.mean) * (e - est.mean);
    est.std = std::sqrt(ss / (n - 1.0));
  }
  return est;
}

double correlation_energy(const EnergyEstimate& estimate, double mean_field_energy) {
  return estimate.mean - mean_field_energy;
}

std::pair<Eigen::MatrixXd, Eri> rdms_from_vqe(double theta, const AnsatzBuilder& ansatz,
                                              int n_orbitals, int n_alpha, int n_beta,
                                              const VqeConfig& cfg) {
  const int n_qubits = 2 * n_orbitals;
  const auto un = static_cast<std::size_t>(n_orbitals);
  std::vector<QubitOperator> ops1(un * un), ops2(un * un * un * un);
  for (int p = 0; p < n_orbitals; ++p)
    for (int q = 0; q < n_orbitals; ++q) {
      FermionOperator f;
      for (int s = 0; s < 2; ++s) f.add({{2 * p + s, true}, {2 * q + s, false}}, 1.0);
      ops1[static_cast<std::size_t>(p * n_orbitals + q)] = jordan_wigner(f, n_qubits);
    }
  for (int p = 0; p < n_orbitals; ++p)
    for (int q = 0; q < n_orbitals; ++q)
      for (int r = 0; r < n_orbitals; ++r)
        for (int s = 0; s < n_orbitals; ++s) {
          FermionOperator f;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              f.add({{2 * p + a, true}, {2 * r + b, true}, {2 * s + b, false}, {2 * q + a, false}},
                    1.0);
          ops2[static_cast<std::size_t>(((p * n_orbitals + q) * n_orbitals + r) * n_orbitals + s)] =
              jordan_wigner(f.normal_ordered(), n_qubits);
        }

  const Circuit circ = ansatz(theta);
  std::function<double(const QubitOperator&)> measure;
  std::map<PauliString, double> pauli_values;
  if (!cfg.uses_shots()) {
    const auto state = simulate_statevector(circ);
    measure = [state](const QubitOperator& op) { return expectation(op, state).real(); };
  } else {
    cfg.validate();
    QubitOperator all(n_qubits);
    for (const auto* ops : {&ops1, &ops2})
      for (const auto& op : *ops)
        for (const auto& [p, c] : op.terms())
          if (!p.is_identity()) all.add(p, 1.0);
    const auto symmetries = find_z2_symmetries(QubitOperator(n_qubits), n_alpha, n_beta);
    const auto groups = partition_commuting(all, symmetries);
    std::optional<SpamProfile> spam;
    if (cfg.spam) spam = calibrate_for(cfg, n_qubits);
    const auto dists = measured_distributions(groups, circ, cfg, cfg.final_shots,
                                              derive_seed(cfg.seed, {kRdmStream}),
                                              spam ? &*spam : nullptr, nullptr);
    for (std::size_t g = 0; g < groups.size(); ++g)
      for (const auto& [p, c] : groups[g].terms) {
        double e = 0.0;
        for (std::size_t b = 0; b < dists[g].probs.size(); ++b)
          e += dists[g].probs[b] * eigenvalue(b, p.support());
        pauli_values[p] = e;
      }
    measure = [&pauli_values](const QubitOperator& op) {
      double v = 0.0;
      for (const auto& [p, c] : op.terms())
        v += c.real() * (p.is_identity() ? 1.0 : pauli_values.at(p));
      return v;
    };
  }

  Eigen::MatrixXd rdm1(n_orbitals, n_orbitals);
  for (int p = 0; p < n_orbitals; ++p)
    for (int q = 0; q < n_orbitals; ++q)
      rdm1(p, q) = measure(ops1[static_cast<std::size_t>(p * n_orbitals + q)]);
  Eri rdm2(un);
  for (std::size_t p = 0; p < un; ++p)
    for (std::size_t q = 0; q < un; ++q)
      for (std::size_t r = 0; r < un; ++r)
        for (std::size_t s = 0; s < un; ++s) rdm2(p, q, r, s) = measure(ops2[((p * un + q) * un + r) * un + s]);

  if (cfg.uses_shots()) {
    // Real wavefunction symmetries, restored after sampling.
    rdm1 = 0.5 * (rdm1 + rdm1.transpose()).eval();
    Eri sym(un);
    for (std::size_t p = 0; p < un; ++p)
      for (std::size_t q = 0; q < un; ++q)
        for (std::size_t r = 0; r < un; ++r)
          for (std::size_t s = 0; s < un; ++s)
            sym(p, q, r, s) = 0.25 * (rdm2(p, q, r, s) + rdm2(r, s, p, q) + rdm2(q, p, s, r) +
                                      rdm2(s, r, q, p));
    rdm2 = std::move(sym);
  }
  return {rdm1, rdm2};
}

MitigationComparison compare_mitigation(const VqeProblem& prob, const Circuit& circ,
                                        const NoiseModel& noise, std::int64_t shots,
                                        std::uint64_t seed, const SpamProfile& spam) {
  MitigationComparison out;
  out.statevector = statevector_energy(prob, circ);
  out.raw = out.pmsv = out.pmsv_spam = out.spam_pmsv = prob.constant;
  std::int64_t requested = 0, kept = 0;
  for (std::size_t g = 0; g < prob.groups.size(); ++g) {
    const auto& group = prob.groups[g];
    const auto table = sample_shots(circ, group, shots, noise, derive_seed(seed, {g}));
    const auto raw = to_distribution(table);
    out.raw += group_expectation(group, raw);
    if (group.symmetries.empty()) {
      out.pmsv += group_expectation(group, raw);
      const auto corrected = spam_correct(raw, spam);
      out.pmsv_spam += group_expectation(group, corrected);
      out.spam_pmsv += group_expectation(group, corrected);
      continue;
    }
    const auto filtered = pmsv_filter(table, group.symmetries);
    requested += table.n_recorded;
    kept += filtered.n_recorded;
    out.pmsv += group_expectation(group, to_distribution(filtered));
    out.pmsv_spam += group_expectation(group, spam_correct(filtered, spam));
    out.spam_pmsv += group_expectation(
        group, pmsv_filter(spam_correct(raw, spam), group.basis, group.symmetries));
  }
  out.survival_fraction =
      requested > 0 ? static_cast<double>(kept) / static_cast<double>(requested) : 1.0;
  return out;
}

FragmentSolver vqe_fragment_solver(const VqeConfig& cfg, const ActiveSpace& active,
                                   std::uint64_t stream) {
  cfg.validate();
  return [cfg, active, stream](const EmbeddingProblem& prob) {
    const auto as = make_active_space(prob, active);
    const int n_alpha = active.n_electrons / 2, n_beta = active.n_electrons / 2;
    const int n_orb = active.n_spin_orbitals / 2;
    std::uint64_t reference = 0;
    for (int i = 0; i < n_alpha; ++i) reference |= std::uint64_t{1} << (2 * i);
    for (int i = 0; i < n_beta; ++i) reference |= std::uint64_t{1} << (2 * i + 1);
    const AnsatzBuilder ansatz = [reference, n_so = active.n_spin_orbitals](double theta) {
      return build_yxxx_ansatz(theta, n_so, reference);
    };
    VqeConfig local = cfg;
    local.seed = derive_seed(cfg.seed, {stream});
    const auto vp = make_vqe_problem(qubit_hamiltonian(as.hamiltonian), n_alpha, n_beta);
    const auto est = vqe_minimize(vp, ansatz, local);
    auto [rdm1, rdm2] = rdms_from_vqe(est.theta_star, ansatz, n_orb, n_alpha, n_beta, local);
    auto sol = assemble_fragment_solution(prob, as, rdm1, rdm2, est.mean);
    sol.std_error = est.std;
    sol.survival_fraction = est.survival_fraction;
    return sol;
  };
}

}  // namespace qembed
