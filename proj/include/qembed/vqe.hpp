#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qembed/active_space.hpp"
#include "qembed/circuit.hpp"
#include "qembed/dmet.hpp"
#include "qembed/mitigation.hpp"
#include "qembed/qubitmap.hpp"
#include "qembed/shots.hpp"

namespace qembed {

enum class Optimizer { Rotosolve, GoldenSection, Scan };
enum class Backend { Statevector, Shots, NoisyShots };
enum class MitigationOrder { PmsvThenSpam, SpamThenPmsv };
enum class ThetaSource { Backend, Statevector };

std::string to_string(Optimizer o);
std::string to_string(Backend b);
Optimizer optimizer_from_string(const std::string& s);
Backend backend_from_string(const std::string& s);

struct VqeConfig {
  Optimizer optimizer = Optimizer::Rotosolve;
  Backend backend = Backend::Statevector;
  std::int64_t shots_per_iteration = 6000;  // per measurement group
  std::int64_t final_shots = 60000;         // per measurement group
  int n_blocks = 10;
  bool pmsv = true;
  bool spam = true;
  MitigationOrder order = MitigationOrder::PmsvThenSpam;
  NoiseModel noise = NoiseModel::preset("nisq-2021");
  std::int64_t spam_shots_per_state = 20000;
  /// Where theta* comes from: the configured backend (optimized with
  /// shots_per_iteration) or an exact statevector optimization.
  ThetaSource theta_source = ThetaSource::Backend;
  double theta0 = 0.0;
  int max_sweeps = 50;       // rotosolve sweeps on the statevector
  int max_noisy_sweeps = 3;  // sweeps when energies carry shot noise
  double theta_tol = 1e-12;
  int scan_points = 720;
  std::uint64_t seed = 0;

  void validate() const;
  bool uses_shots() const { return backend != Backend::Statevector; }
  std::optional<NoiseModel> noise_model() const;
};

/// Qubit Hamiltonian prepared for measurement.
struct VqeProblem {
  QubitOperator hamiltonian;
  std::vector<Symmetry> symmetries;
  std::vector<MeasurementGroup> groups;
  double constant = 0.0;
};

VqeProblem make_vqe_problem(const QubitOperator& hamiltonian, int n_alpha, int n_beta);

using AnsatzBuilder = std::function<Circuit(double theta)>;

struct EnergyEstimate {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation over blocks
  int n_blocks = 1;
  double survival_fraction = 1.0;
  double theta_star = 0.0;
  std::vector<double> block_energies;
  std::vector<std::pair<double, double>> trace;  // (theta, energy) evaluations
};

/// One energy evaluation through the shot pipeline: every group sampled with
/// `shots` shots, mitigated per cfg. `survival` receives the PMSV survival
/// fraction over groups carrying a symmetry.
double shot_energy(const VqeProblem& prob, const Circuit& circ, const VqeConfig& cfg,
                   std::int64_t shots, std::uint64_t seed, const SpamProfile* spam,
                   double* survival = nullptr);

/// Exact statevector energy.
double statevector_energy(const VqeProblem& prob, const Circuit& circ);

/// Optimizes the single ansatz angle then evaluates the final energy in
/// n_blocks blocks of final_shots / n_blocks shots per group.
EnergyEstimate vqe_minimize(const VqeProblem& prob, const AnsatzBuilder& ansatz,
                            const VqeConfig& cfg);

/// E_VQE - E_mean-field; the sign is not enforced.
double correlation_energy(const EnergyEstimate& estimate, double mean_field_energy);

/// Spin-summed one- and two-particle RDMs of the ansatz state over
/// n_orbitals spatial orbitals. Statevector: exact. Shots: Pauli
/// expectations measured through the same grouping and mitigation.
std::pair<Eigen::MatrixXd, Eri> rdms_from_vqe(double theta, const AnsatzBuilder& ansatz,
                                              int n_orbitals, int n_alpha, int n_beta,
                                              const VqeConfig& cfg);

/// Raw, PMSV and mitigated energies from the same shot tables, for the
/// mitigation comparison report.
struct MitigationComparison {
  double statevector = 0.0;
  double raw = 0.0;
  double pmsv = 0.0;
  double pmsv_spam = 0.0;
  double spam_pmsv = 0.0;
  double survival_fraction = 1.0;
};

MitigationComparison compare_mitigation(const VqeProblem& prob, const Circuit& circ,
                                        const NoiseModel& noise, std::int64_t shots,
                                        std::uint64_t seed, const SpamProfile& spam);

/// DMET fragment solver: 2e/4so-style active space, YXXX ansatz, VQE.
/// Each call derives its seed from cfg.seed and `stream`.
FragmentSolver vqe_fragment_solver(const VqeConfig& cfg, const ActiveSpace& active,
                                   std::uint64_t stream = 0);

}  // namespace qembed
