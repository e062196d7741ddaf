#include "qembed/active_space.hpp"

#include "qembed/error.hpp"
#include "qembed/scf.hpp"

namespace qembed {

ActiveSpaceProblem make_active_space(const EmbeddingProblem& prob, const ActiveSpace& active) {
  const auto n = prob.n_orbitals();
  if (active.n_spin_orbitals % 2 != 0 || active.n_electrons % 2 != 0 || active.n_electrons < 0)
    throw Error("active space needs an even electron count and an even spin-orbital count");
  const int n_act = active.n_spin_orbitals / 2;
  const int n_core2 = prob.n_elec - active.n_electrons;
  if (n_core2 < 0 || n_core2 % 2 != 0)
    throw Error("active space (" + std::to_string(active.n_electrons) + "e) incompatible with " +
                std::to_string(prob.n_elec) + " embedding electrons");
  const int n_core = n_core2 / 2;
  if (n_core + n_act > n)
    throw Error("active space does not fit in " + std::to_string(n) + " embedding orbitals");
  if (active.n_electrons > active.n_spin_orbitals)
    throw Error("more active electrons than active spin orbitals");

  std::optional<Eigen::MatrixXd> guess;
  if (prob.guess_rdm1.size() > 0) guess = prob.guess_rdm1;
  const auto mf = run_rhf(Eigen::MatrixXd::Identity(n, n), prob.h_emb, prob.eri_emb, 0.0,
                          prob.n_elec, ScfOptions{}, guess);

  ActiveSpaceProblem as;
  as.core_orbitals = mf.mo_coeffs.leftCols(n_core);
  as.active_orbitals = mf.mo_coeffs.middleCols(n_core, n_act);
  as.n_active_electrons = active.n_electrons;
  as.reference_energy = mf.e_electronic;

  const Eigen::MatrixXd d_core = 2.0 * as.core_orbitals * as.core_orbitals.transpose();
  const Eigen::MatrixXd v_core = rhf_two_electron(prob.eri_emb, d_core);
  as.hamiltonian.constant = 0.5 * d_core.cwiseProduct(2.0 * prob.h_emb + v_core).sum();
  as.hamiltonian.h = as.active_orbitals.transpose() * (prob.h_emb + v_core) * as.active_orbitals;
  as.hamiltonian.eri = transform(prob.eri_emb, as.active_orbitals);
  return as;
}

std::pair<Eigen::MatrixXd, Eri> expand_active_rdms(const ActiveSpaceProblem& as,
                                                   const Eigen::MatrixXd& rdm1_active,
                                                   const Eri& rdm2_active) {
  const auto n_c = as.core_orbitals.cols();
  const auto n_a = as.active_orbitals.cols();
  const auto m = n_c + n_a;
  const auto um = static_cast<std::size_t>(m);
  Eigen::MatrixXd c(as.core_orbitals.rows(), m);
  c << as.core_orbitals, as.active_orbitals;

  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(m, m);
  dc.topLeftCorner(n_c, n_c) = 2.0 * Eigen::MatrixXd::Identity(n_c, n_c);
  Eigen::MatrixXd ga = Eigen::MatrixXd::Zero(m, m);
  ga.bottomRightCorner(n_a, n_a) = rdm1_active;

  Eri g(um);
  for (std::size_t p = 0; p < um; ++p)
    for (std::size_t q = 0; q < um; ++q)
      for (std::size_t r = 0; r < um; ++r)
        for (std::size_t s = 0; s < um; ++s) {
          const auto P = static_cast<Eigen::Index>(p), Q = static_cast<Eigen::Index>(q),
                     R = static_cast<Eigen::Index>(r), S = static_cast<Eigen::Index>(s);
          double v = dc(P, Q) * dc(R, S) - 0.5 * dc(P, S) * dc(R, Q);
          v += dc(P, Q) * ga(R, S) + ga(P, Q) * dc(R, S) -
               0.5 * (dc(P, S) * ga(R, Q) + ga(P, S) * dc(R, Q));
          if (P >= n_c && Q >= n_c && R >= n_c && S >= n_c)
            v += rdm2_active(p - static_cast<std::size_t>(n_c), q - static_cast<std::size_t>(n_c),
                             r - static_cast<std::size_t>(n_c), s - static_cast<std::size_t>(n_c));
          g(p, q, r, s) = v;
        }
  const Eigen::MatrixXd ct = c.transpose();
  return {c * (dc + ga) * c.transpose(), transform(g, ct)};
}

FragmentSolution assemble_fragment_solution(const EmbeddingProblem& prob,
                                            const ActiveSpaceProblem& as,
                                            const Eigen::MatrixXd& rdm1_active,
                                            const Eri& rdm2_active, double e_active) {
  auto [rdm1, rdm2] = expand_active_rdms(as, rdm1_active, rdm2_active);
  FragmentSolution sol;
  sol.rdm1 = std::move(rdm1);
  sol.rdm2 = std::move(rdm2);
  sol.e_frag = fragment_energy(sol.rdm1, sol.rdm2, prob);
  sol.n_elec_on_fragment = fragment_electrons(sol.rdm1, prob);
  sol.e_solver = e_active;
  sol.e_reference = as.reference_energy;
  sol.e_corr = e_active - as.reference_energy;
  return sol;
}

}  // namespace qembed
