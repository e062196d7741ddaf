#include "qembed/dmet.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "qembed/active_space.hpp"
#include "qembed/error.hpp"
#include "qembed/fci.hpp"
#include "qembed/log.hpp"

namespace qembed {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::MeanField: return "hf";
    case SolverKind::ExactDiagonalization: return "fci";
    case SolverKind::Vqe: return "vqe";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "hf" || name == "mean-field") return SolverKind::MeanField;
  if (name == "fci" || name == "exact") return SolverKind::ExactDiagonalization;
  if (name == "vqe") return SolverKind::Vqe;
  throw Error("unknown fragment solver '" + name + "' (expected hf, fci or vqe)");
}

FragmentPlan define_fragments(const Molecule& mol, const BasisSet& basis,
                              const std::vector<std::vector<std::size_t>>& atom_partition,
                              const std::vector<SolverKind>& solvers,
                              const std::vector<std::optional<ActiveSpace>>& active_spaces) {
  if (atom_partition.empty()) throw Error("fragment partition is empty");
  if (solvers.size() != atom_partition.size())
    throw Error("need one solver per fragment");
  if (!active_spaces.empty() && active_spaces.size() != atom_partition.size())
    throw Error("active_spaces must be empty or have one entry per fragment");

  std::vector<int> owner(mol.atoms.size(), -1);
  for (std::size_t f = 0; f < atom_partition.size(); ++f) {
    if (atom_partition[f].empty()) throw Error("fragment " + std::to_string(f) + " is empty");
    for (std::size_t a : atom_partition[f]) {
      if (a >= mol.atoms.size())
        throw Error("atom index " + std::to_string(a) + " out of range");
      if (owner[a] >= 0)
        throw Error("atom " + std::to_string(a) + " appears in fragments " +
                    std::to_string(owner[a]) + " and " + std::to_string(f));
      owner[a] = static_cast<int>(f);
    }
  }
  for (std::size_t a = 0; a < owner.size(); ++a)
    if (owner[a] < 0) throw Error("atom " + std::to_string(a) + " is not in any fragment");

  FragmentPlan plan;
  plan.fragments.resize(atom_partition.size());
  for (std::size_t mu = 0; mu < basis.n_ao; ++mu)
    plan.fragments[static_cast<std::size_t>(owner[basis.ao_atom[mu]])].push_back(mu);
  plan.solvers = solvers;
  plan.active_spaces = active_spaces.empty()
                           ? std::vector<std::optional<ActiveSpace>>(atom_partition.size())
                           : active_spaces;
  for (std::size_t f = 0; f < plan.size(); ++f)
    if (plan.active_spaces[f] && plan.solvers[f] == SolverKind::MeanField)
      throw Error("fragment " + std::to_string(f) + ": active space needs a correlated solver");
  return plan;
}

Eigen::MatrixXd EmbeddingBasis::embedding_orbitals() const {
  Eigen::MatrixXd b(frag_orbitals.rows(), n_emb());
  b << frag_orbitals, bath_orbitals;
  return b;
}

Eigen::MatrixXd EmbeddingBasis::gamma_env() const {
  return env_occupied * env_occupied.transpose();
}

EmbeddingBasis build_bath(const LocalizedRdm& rdm, const std::vector<std::size_t>& fragment,
                          double threshold) {
  const auto& gamma = rdm.gamma;
  const Eigen::Index n = gamma.rows();
  const double idem = (gamma * gamma - gamma).cwiseAbs().maxCoeff();
  if (idem > 1e-6)
    throw Error("Gamma is not idempotent (max |G^2 - G| = " + std::to_string(idem) + ")");

  std::vector<bool> in_frag(static_cast<std::size_t>(n), false);
  for (auto p : fragment) {
    if (static_cast<Eigen::Index>(p) >= n) throw Error("fragment orbital out of range");
    in_frag[p] = true;
  }
  std::vector<Eigen::Index> env;
  for (Eigen::Index p = 0; p < n; ++p)
    if (!in_frag[static_cast<std::size_t>(p)]) env.push_back(p);
  const auto n_a = static_cast<Eigen::Index>(fragment.size());
  const auto n_e = static_cast<Eigen::Index>(env.size());

  EmbeddingBasis out;
  out.fragment = fragment;
  out.frag_orbitals = Eigen::MatrixXd::Zero(n, n_a);
  for (Eigen::Index k = 0; k < n_a; ++k) out.frag_orbitals(static_cast<Eigen::Index>(fragment[static_cast<std::size_t>(k)]), k) = 1.0;

  std::vector<Eigen::VectorXd> bath, occ;
  std::vector<double> bath_occ;
  if (n_e > 0) {
    Eigen::MatrixXd g_ee(n_e, n_e);
    for (Eigen::Index i = 0; i < n_e; ++i)
      for (Eigen::Index j = 0; j < n_e; ++j) g_ee(i, j) = gamma(env[static_cast<std::size_t>(i)], env[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_ee);
    // Entanglement strength of each environment eigenvector.
    std::vector<std::pair<double, Eigen::Index>> strength;
    for (Eigen::Index k = 0; k < n_e; ++k) {
      const double lam = std::clamp(es.eigenvalues()(k), 0.0, 1.0);
      strength.emplace_back(std::sqrt(lam * (1.0 - lam)), k);
    }
    std::sort(strength.begin(), strength.end(),
              [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    std::vector<bool> is_bath(static_cast<std::size_t>(n_e), false);
    for (Eigen::Index k = 0; k < std::min(n_a, n_e); ++k)
      if (strength[static_cast<std::size_t>(k)].first > threshold) is_bath[static_cast<std::size_t>(strength[static_cast<std::size_t>(k)].second)] = true;
    for (Eigen::Index k = 0; k < n_e; ++k) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i < n_e; ++i) v(env[static_cast<std::size_t>(i)]) = es.eigenvectors()(i, k);
      if (is_bath[static_cast<std::size_t>(k)]) {
        bath.push_back(v);
        bath_occ.push_back(es.eigenvalues()(k));
      } else if (es.eigenvalues()(k) > 0.5) {
        occ.push_back(v);
      }
    }
  }
  out.bath_orbitals.resize(n, static_cast<Eigen::Index>(bath.size()));
  out.bath_eigenvalues.resize(static_cast<Eigen::Index>(bath.size()));
  for (std::size_t k = 0; k < bath.size(); ++k) {
    out.bath_orbitals.col(static_cast<Eigen::Index>(k)) = bath[k];
    out.bath_eigenvalues(static_cast<Eigen::Index>(k)) = bath_occ[k];
  }
  out.env_occupied.resize(n, static_cast<Eigen::Index>(occ.size()));
  for (std::size_t k = 0; k < occ.size(); ++k) out.env_occupied.col(static_cast<Eigen::Index>(k)) = occ[k];

  const Eigen::MatrixXd b = out.embedding_orbitals();
  const double raw = 2.0 * (b.transpose() * gamma * b).trace();
  int n_elec = static_cast<int>(std::lround(raw));
  if (n_elec % 2 != 0) {
    const int shifted = (raw > n_elec) ? n_elec + 1 : n_elec - 1;
    std::ostringstream msg;
    msg << "embedding electron count " << raw << " rounds to odd " << n_elec
        << "; using " << shifted;
    warn(msg.str());
    n_elec = shifted;
  }
  out.n_elec_emb = n_elec;
  return out;
}

LowdinIntegrals to_lowdin(const IntegralSet& ints, const Eigen::MatrixXd& x) {
  return {x.transpose() * ints.h_core * x, transform(ints.eri, x), ints.e_nuc};
}

EmbeddingProblem EmbeddingProblem::with_mu(double new_mu) const {
  EmbeddingProblem out = *this;
  for (auto p : frag_indices) out.h_emb(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) += mu - new_mu;
  out.mu = new_mu;
  return out;
}

EmbeddingProblem build_embedding_problem(const LowdinIntegrals& ints, const EmbeddingBasis& basis,
                                         double mu) {
  const Eigen::MatrixXd b = basis.embedding_orbitals();
  if (b.rows() != ints.h.rows())
    throw Error("embedding basis has " + std::to_string(b.rows()) + " rows, integrals " +
                std::to_string(ints.h.rows()));
  const Eigen::MatrixXd g_env = basis.gamma_env();
  const Eigen::MatrixXd v_full = 2.0 * coulomb(ints.eri, g_env) - exchange(ints.eri, g_env);

  EmbeddingProblem prob;
  prob.h_bare = b.transpose() * ints.h * b;
  prob.v_env = b.transpose() * v_full * b;
  prob.h_emb = prob.h_bare + prob.v_env;
  prob.eri_emb = transform(ints.eri, b);
  prob.n_elec = basis.n_elec_emb;
  prob.frag_indices.resize(static_cast<std::size_t>(basis.n_frag()));
  std::iota(prob.frag_indices.begin(), prob.frag_indices.end(), std::size_t{0});
  prob.mu = 0.0;
  prob = prob.with_mu(mu);
  return prob;
}

EmbeddingProblem build_embedding_problem(const IntegralSet& ints, const Eigen::MatrixXd& x,
                                         const EmbeddingBasis& basis, double mu) {
  return build_embedding_problem(to_lowdin(ints, x), basis, mu);
}

double fragment_energy(const Eigen::MatrixXd& rdm1, const Eri& rdm2, const EmbeddingProblem& prob) {
  const Eigen::MatrixXd h_eff = prob.h_bare + 0.5 * prob.v_env;
  const std::size_t n = prob.eri_emb.dim();
  double one = 0.0, two = 0.0;
  for (auto p : prob.frag_indices) {
    const auto ip = static_cast<Eigen::Index>(p);
    one += h_eff.row(ip).dot(rdm1.col(ip));
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) two += prob.eri_emb(p, q, r, s) * rdm2(p, q, r, s);
  }
  return one + 0.5 * two;
}

double fragment_electrons(const Eigen::MatrixXd& rdm1, const EmbeddingProblem& prob) {
  double n = 0.0;
  for (auto p : prob.frag_indices) n += rdm1(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
  return n;
}

namespace {

ScfSolution embedding_rhf(const EmbeddingProblem& prob) {
  const auto n = prob.n_orbitals();
  std::optional<Eigen::MatrixXd> guess;
  if (prob.guess_rdm1.size() > 0) guess = prob.guess_rdm1;
  return run_rhf(Eigen::MatrixXd::Identity(n, n), prob.h_emb, prob.eri_emb, 0.0, prob.n_elec,
                 ScfOptions{}, guess);
}

}  // namespace

FragmentSolution solve_fragment_mean_field(const EmbeddingProblem& prob) {
  FragmentSolution sol;
  const auto n = prob.n_orbitals();
  if (prob.n_elec == 0) {
    sol.rdm1 = Eigen::MatrixXd::Zero(n, n);
    sol.rdm2 = Eri(static_cast<std::size_t>(n));
    return sol;
  }
  const auto mf = embedding_rhf(prob);
  const auto occ = mf.mo_coeffs.leftCols(mf.n_occ);
  sol.rdm1 = 2.0 * occ * occ.transpose();
  sol.rdm2 = mean_field_rdm2(sol.rdm1);
  sol.e_frag = fragment_energy(sol.rdm1, sol.rdm2, prob);
  sol.n_elec_on_fragment = fragment_electrons(sol.rdm1, prob);
  sol.e_solver = energy_from_rdms(prob.hamiltonian(), sol.rdm1, sol.rdm2);
  sol.e_reference = sol.e_solver;
  return sol;
}

FragmentSolution solve_fragment_fci(const EmbeddingProblem& prob,
                                    const std::optional<ActiveSpace>& active) {
  if (active) {
    const auto as = make_active_space(prob, *active);
    const int half = as.n_active_electrons / 2;
    const auto fci = solve_fci(as.hamiltonian, half, half);
    return assemble_fragment_solution(prob, as, fci.rdm1, fci.rdm2, fci.energy);
  }
  if (prob.n_elec % 2 != 0) throw Error("embedding problem has an odd electron count");
  const int half = prob.n_elec / 2;
  const auto ham = prob.hamiltonian();
  const auto fci = solve_fci(ham, half, half);
  FragmentSolution sol;
  sol.rdm1 = fci.rdm1;
  sol.rdm2 = fci.rdm2;
  sol.e_frag = fragment_energy(sol.rdm1, sol.rdm2, prob);
  sol.n_elec_on_fragment = fragment_electrons(sol.rdm1, prob);
  sol.e_solver = fci.energy;
  sol.e_reference = prob.n_elec > 0 ? embedding_rhf(prob).e_electronic : 0.0;
  sol.e_corr = sol.e_solver - sol.e_reference;
  return sol;
}

FragmentSolver classical_solver(SolverKind kind, const std::optional<ActiveSpace>& active) {
  switch (kind) {
    case SolverKind::MeanField:
      return [](const EmbeddingProblem& p) { return solve_fragment_mean_field(p); };
    case SolverKind::ExactDiagonalization:
      return [active](const EmbeddingProblem& p) { return solve_fragment_fci(p, active); };
    case SolverKind::Vqe:
      break;
  }
  throw Error("vqe fragments need a solver from the vqe module");
}

ChemicalPotentialResult solve_chemical_potential(const std::vector<EmbeddingProblem>& problems,
                                                 const std::vector<FragmentSolver>& solvers,
                                                 double n_total,
                                                 const ChemicalPotentialOptions& opts) {
  if (problems.size() != solvers.size()) throw Error("need one solver per embedding problem");
  ChemicalPotentialResult res;
  std::vector<FragmentSolution> current;
  auto evaluate = [&](double mu) {
    current.clear();
    double total = 0.0;
    for (std::size_t i = 0; i < problems.size(); ++i) {
      current.push_back(solvers[i](problems[i].with_mu(mu)));
      total += current.back().n_elec_on_fragment;
    }
    const double f = total - n_total;
    res.trace.emplace_back(mu, f);
    return f;
  };
  auto accept = [&](double mu) {
    res.mu = mu;
    res.fragments = current;
    return res;
  };
  auto fail = [&](const std::string& why) {
    std::ostringstream msg;
    msg << why << "; f(mu) trace:";
    for (auto [m, f] : res.trace) msg << " (" << m << ", " << f << ")";
    return Error(msg.str());
  };

  const double f0 = evaluate(0.0);
  if (std::abs(f0) < opts.tolerance) return accept(0.0);

  // Bracket, expanding geometrically around zero.
  double lo = 0.0, f_lo = f0, hi = 0.0, f_hi = f0;
  double width = opts.initial_half_width;
  bool bracketed = false;
  while (width <= opts.max_abs_mu + 1e-12) {
    const double fm = evaluate(-width);
    if (std::abs(fm) < opts.tolerance) return accept(-width);
    const double fp = evaluate(width);
    if (std::abs(fp) < opts.tolerance) return accept(width);
    // Prefer the tightest sign change that includes the origin.
    if (f0 * fp < 0) {
      lo = 0.0; f_lo = f0; hi = width; f_hi = fp; bracketed = true;
    } else if (f0 * fm < 0) {
      lo = -width; f_lo = fm; hi = 0.0; f_hi = f0; bracketed = true;
    }
    if (bracketed) break;
    width *= 2.0;
  }
  if (!bracketed) throw fail("no sign change of the electron-count error within |mu| <= " +
                             std::to_string(opts.max_abs_mu));

  // Secant steps safeguarded by the bracket (Illinois update).
  int side = 0;
  for (int it = 0; it < opts.max_evaluations; ++it) {
    double mu = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    if (!(mu > std::min(lo, hi) && mu < std::max(lo, hi))) mu = 0.5 * (lo + hi);
    const double f = evaluate(mu);
    if (std::abs(f) < opts.tolerance) return accept(mu);
    if (f * f_hi < 0) {
      lo = hi; f_lo = f_hi;
      hi = mu; f_hi = f;
      side = 0;
    } else {
      hi = mu; f_hi = f;
      if (side == -1) f_lo *= 0.5;
      side = -1;
    }
  }
  throw fail("chemical potential did not converge");
}

double dmet_total_energy(std::span<const double> fragment_energies, double e_nuc) {
  return std::accumulate(fragment_energies.begin(), fragment_energies.end(), e_nuc);
}

DmetSystem prepare_dmet(const IntegralSet& ints, const ScfSolution& scf, const FragmentPlan& plan,
                        int n_electrons) {
  DmetSystem sys;
  const Eigen::MatrixXd x = lowdin_transform(ints.overlap);
  sys.rdm = localized_rdm(scf, x, ints.overlap);
  sys.ints = to_lowdin(ints, x);
  sys.n_electrons = n_electrons;
  for (const auto& frag : plan.fragments) {
    sys.bases.push_back(build_bath(sys.rdm, frag));
    auto prob = build_embedding_problem(sys.ints, sys.bases.back(), 0.0);
    const Eigen::MatrixXd b = sys.bases.back().embedding_orbitals();
    prob.guess_rdm1 = 2.0 * b.transpose() * sys.rdm.gamma * b;
    sys.problems.push_back(std::move(prob));
  }
  return sys;
}

DmetResult run_dmet(const DmetSystem& system, const std::vector<FragmentSolver>& solvers,
                    const DmetOptions& opts) {
  auto mu_res = solve_chemical_potential(system.problems, solvers, system.n_electrons, opts.mu);
  DmetResult out;
  out.mu = mu_res.mu;
  out.mu_trace = mu_res.trace;
  out.fragments = std::move(mu_res.fragments);
  std::vector<double> e;
  for (const auto& f : out.fragments) e.push_back(f.e_frag);
  out.e_total = dmet_total_energy(e, system.ints.e_nuc);
  if (opts.report_energy_slope) {
    constexpr double kStep = 1e-4;
    auto energy_at = [&](double mu) {
      double total = system.ints.e_nuc;
      for (std::size_t i = 0; i < solvers.size(); ++i)
        total += solvers[i](system.problems[i].with_mu(mu)).e_frag;
      return total;
    };
    out.energy_slope = (energy_at(out.mu + kStep) - energy_at(out.mu - kStep)) / (2 * kStep);
  }
  return out;
}

DmetResult reevaluate_fragments(const DmetSystem& system, DmetResult result,
                                const std::vector<FragmentSolver>& replacements) {
  if (replacements.size() != result.fragments.size())
    throw Error("need one replacement entry per fragment");
  std::vector<double> e;
  for (std::size_t i = 0; i < replacements.size(); ++i) {
    if (replacements[i]) result.fragments[i] = replacements[i](system.problems[i].with_mu(result.mu));
    e.push_back(result.fragments[i].e_frag);
  }
  result.e_total = dmet_total_energy(e, system.ints.e_nuc);
  return result;
}

}  // namespace qembed
