#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qembed/basis.hpp"
#include "qembed/hamiltonian.hpp"
#include "qembed/integrals.hpp"
#include "qembed/molecule.hpp"
#include "qembed/scf.hpp"

namespace qembed {

enum class SolverKind { MeanField, ExactDiagonalization, Vqe };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);  // "hf", "fci", "vqe"

/// Correlated treatment restricted to n_electrons in n_spin_orbitals around
/// the HOMO/LUMO gap of the embedding mean-field solution.
struct ActiveSpace {
  int n_electrons = 2;
  int n_spin_orbitals = 4;
};

struct FragmentPlan {
  std::vector<std::vector<std::size_t>> fragments;  // Lowdin AO indices, disjoint, covering
  std::vector<SolverKind> solvers;
  std::vector<std::optional<ActiveSpace>> active_spaces;

  std::size_t size() const { return fragments.size(); }
};

/// Maps an atom partition onto AO index sets through AO ownership.
FragmentPlan define_fragments(const Molecule& mol, const BasisSet& basis,
                              const std::vector<std::vector<std::size_t>>& atom_partition,
                              const std::vector<SolverKind>& solvers,
                              const std::vector<std::optional<ActiveSpace>>& active_spaces = {});

inline constexpr double kBathThreshold = 1e-6;

/// Fragment, bath and occupied-environment orbitals as columns over the
/// Lowdin basis.
struct EmbeddingBasis {
  std::vector<std::size_t> fragment;
  Eigen::MatrixXd frag_orbitals;
  Eigen::MatrixXd bath_orbitals;
  Eigen::MatrixXd env_occupied;
  Eigen::VectorXd bath_eigenvalues;  // occupations of the bath orbitals in Gamma_EE
  int n_elec_emb = 0;

  Eigen::Index n_frag() const { return frag_orbitals.cols(); }
  Eigen::Index n_bath() const { return bath_orbitals.cols(); }
  Eigen::Index n_emb() const { return n_frag() + n_bath(); }
  Eigen::MatrixXd embedding_orbitals() const;
  Eigen::MatrixXd gamma_env() const;  // per spin
};

/// Bath from the environment-environment block of an idempotent Gamma.
/// Throws when Gamma is not idempotent to 1e-6.
EmbeddingBasis build_bath(const LocalizedRdm& rdm, const std::vector<std::size_t>& fragment,
                          double threshold = kBathThreshold);

struct LowdinIntegrals {
  Eigen::MatrixXd h;
  Eri eri;
  double e_nuc = 0.0;
};

LowdinIntegrals to_lowdin(const IntegralSet& ints, const Eigen::MatrixXd& x);

/// Interacting-bath embedding Hamiltonian. Embedding orbitals are ordered
/// fragment first, then bath.
struct EmbeddingProblem {
  Eigen::MatrixXd h_emb;   // h + v_env - mu on fragment diagonal
  Eigen::MatrixXd h_bare;  // projected core Hamiltonian
  Eigen::MatrixXd v_env;   // sum_rs [2(pq|rs) - (ps|rq)] Gamma_env_rs
  Eri eri_emb;
  Eigen::MatrixXd guess_rdm1;  // projected global mean-field rdm1 (spin-summed)
  int n_elec = 0;
  double mu = 0.0;
  std::vector<std::size_t> frag_indices;

  Eigen::Index n_orbitals() const { return h_emb.rows(); }
  SpatialHamiltonian hamiltonian() const { return {0.0, h_emb, eri_emb}; }
  EmbeddingProblem with_mu(double new_mu) const;
};

EmbeddingProblem build_embedding_problem(const LowdinIntegrals& ints, const EmbeddingBasis& basis,
                                         double mu);
EmbeddingProblem build_embedding_problem(const IntegralSet& ints, const Eigen::MatrixXd& x,
                                         const EmbeddingBasis& basis, double mu);

struct FragmentSolution {
  Eigen::MatrixXd rdm1;  // spin-summed, embedding orbitals
  Eri rdm2;
  double e_frag = 0.0;
  double n_elec_on_fragment = 0.0;
  double e_solver = 0.0;     // energy of the embedding Hamiltonian (mu included)
  double e_reference = 0.0;  // mean-field energy of the same (active) space
  double e_corr = 0.0;       // e_solver - e_reference
  double std_error = 0.0;    // sampling error of e_solver, zero for exact solvers
  double survival_fraction = 1.0;
};

/// Fragment energy operator: rows p in the fragment only, environment
/// dressing weighted by 1/2, mu excluded.
double fragment_energy(const Eigen::MatrixXd& rdm1, const Eri& rdm2, const EmbeddingProblem& prob);

double fragment_electrons(const Eigen::MatrixXd& rdm1, const EmbeddingProblem& prob);

/// RHF in the embedding space seeded with the projected global density.
FragmentSolution solve_fragment_mean_field(const EmbeddingProblem& prob);

/// Exact diagonalization of the embedding Hamiltonian, optionally inside an
/// active space.
FragmentSolution solve_fragment_fci(const EmbeddingProblem& prob,
                                    const std::optional<ActiveSpace>& active = std::nullopt);

using FragmentSolver = std::function<FragmentSolution(const EmbeddingProblem&)>;

struct ChemicalPotentialOptions {
  double tolerance = 1e-6;  // electrons
  double initial_half_width = 0.2;
  double max_abs_mu = 2.0;
  int max_evaluations = 60;
};

struct ChemicalPotentialResult {
  double mu = 0.0;
  std::vector<FragmentSolution> fragments;
  std::vector<std::pair<double, double>> trace;  // (mu, f(mu))
};

/// Root of f(mu) = sum_frag N_frag(mu) - n_total by bracketing then secant.
ChemicalPotentialResult solve_chemical_potential(const std::vector<EmbeddingProblem>& problems,
                                                 const std::vector<FragmentSolver>& solvers,
                                                 double n_total,
                                                 const ChemicalPotentialOptions& opts = {});

double dmet_total_energy(std::span<const double> fragment_energies, double e_nuc);

/// Everything mu-independent: Lowdin integrals, Gamma, bath per fragment.
struct DmetSystem {
  LowdinIntegrals ints;
  LocalizedRdm rdm;
  int n_electrons = 0;
  std::vector<EmbeddingBasis> bases;
  std::vector<EmbeddingProblem> problems;  // at mu = 0
};

DmetSystem prepare_dmet(const IntegralSet& ints, const ScfSolution& scf, const FragmentPlan& plan,
                        int n_electrons);

struct DmetResult {
  double e_total = 0.0;
  double mu = 0.0;
  std::vector<FragmentSolution> fragments;
  std::vector<std::pair<double, double>> mu_trace;
  std::optional<double> energy_slope;  // dE/dmu at the root, diagnostic only
};

struct DmetOptions {
  ChemicalPotentialOptions mu;
  bool report_energy_slope = false;
};

/// Single-shot DMET: only the global chemical potential is optimized.
DmetResult run_dmet(const DmetSystem& system, const std::vector<FragmentSolver>& solvers,
                    const DmetOptions& opts = {});

/// Re-solves fragments at the converged mu with replacement solvers (empty
/// entries keep their solution) and recomputes the total energy.
DmetResult reevaluate_fragments(const DmetSystem& system, DmetResult result,
                                const std::vector<FragmentSolver>& replacements);

/// Built-in solver for a plan entry (mean-field or exact diagonalization).
FragmentSolver classical_solver(SolverKind kind, const std::optional<ActiveSpace>& active);

}  // namespace qembed
