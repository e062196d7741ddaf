#include "qembed/scf.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <deque>

#include "qembed/error.hpp"

namespace qembed {

namespace {

class Diis {
 public:
  explicit Diis(int size) : size_(static_cast<std::size_t>(size)) {}

  Eigen::MatrixXd extrapolate(const Eigen::MatrixXd& fock, const Eigen::MatrixXd& error) {
    focks_.push_back(fock);
    errors_.push_back(error);
    if (focks_.size() > size_) {
      focks_.pop_front();
      errors_.pop_front();
    }
    while (focks_.size() > 1) {
      const auto m = static_cast<Eigen::Index>(focks_.size());
      Eigen::MatrixXd b(m + 1, m + 1);
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j <= i; ++j)
          b(i, j) = b(j, i) = errors_[static_cast<std::size_t>(i)]
                                  .cwiseProduct(errors_[static_cast<std::size_t>(j)])
                                  .sum();
      b.row(m).setConstant(-1.0);
      b.col(m).setConstant(-1.0);
      b(m, m) = 0.0;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
      rhs(m) = -1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
      if (lu.isInvertible() && lu.rcond() > 1e-14) {
        Eigen::VectorXd c = lu.solve(rhs);
        Eigen::MatrixXd f = Eigen::MatrixXd::Zero(fock.rows(), fock.cols());
        for (Eigen::Index i = 0; i < m; ++i) f += c(i) * focks_[static_cast<std::size_t>(i)];
        return f;
      }
      focks_.pop_front();
      errors_.pop_front();
    }
    return fock;
  }

 private:
  std::size_t size_;
  std::deque<Eigen::MatrixXd> focks_;
  std::deque<Eigen::MatrixXd> errors_;
};

}  // namespace

Eigen::MatrixXd rhf_two_electron(const Eri& eri, const Eigen::MatrixXd& density) {
  return coulomb(eri, density) - 0.5 * exchange(eri, density);
}

double rhf_energy(const Eigen::MatrixXd& h_core, const Eri& eri, const Eigen::MatrixXd& density) {
  Eigen::MatrixXd f = h_core + rhf_two_electron(eri, density);
  return 0.5 * density.cwiseProduct(h_core + f).sum();
}

Eigen::MatrixXd lowdin_transform(const Eigen::MatrixXd& overlap) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(overlap);
  if (es.info() != Eigen::Success) throw Error("overlap diagonalization failed");
  const double smallest = es.eigenvalues().minCoeff();
  if (smallest < 1e-10)
    throw Error("overlap matrix is nearly linearly dependent (smallest eigenvalue " +
                std::to_string(smallest) + ")");
  const Eigen::VectorXd inv_sqrt = es.eigenvalues().array().rsqrt();
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

ScfSolution run_rhf(const Eigen::MatrixXd& overlap, const Eigen::MatrixXd& h_core,
                    const Eri& eri, double e_nuc, int n_electrons, const ScfOptions& opts,
                    const std::optional<Eigen::MatrixXd>& guess) {
  if (n_electrons < 2 || n_electrons % 2 != 0)
    throw Error("closed-shell RHF needs an even electron count >= 2, got " +
                std::to_string(n_electrons));
  const auto n = overlap.rows();
  const int n_occ = n_electrons / 2;
  if (n_occ > n) throw Error("more occupied orbitals than basis functions");

  const Eigen::MatrixXd x = lowdin_transform(overlap);
  auto diagonalize = [&](const Eigen::MatrixXd& f, Eigen::MatrixXd& c, Eigen::VectorXd& eps) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x.transpose() * f * x);
    c = x * es.eigenvectors();
    eps = es.eigenvalues();
  };
  auto density_of = [&](const Eigen::MatrixXd& c) -> Eigen::MatrixXd {
    const auto occ = c.leftCols(n_occ);
    return 2.0 * occ * occ.transpose();
  };

  Eigen::MatrixXd c;
  Eigen::VectorXd eps;
  Eigen::MatrixXd d;
  if (guess) {
    d = *guess;
  } else {
    diagonalize(h_core, c, eps);
    d = density_of(c);
  }

  Diis diis(opts.diis_size);
  double e_prev = 0.0;
  ScfSolution sol;
  sol.n_occ = n_occ;
  sol.e_nuc = e_nuc;
  double comm_max = 0.0;
  double energy = 0.0;
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::MatrixXd f = h_core + rhf_two_electron(eri, d);
    energy = 0.5 * d.cwiseProduct(h_core + f).sum();
    const Eigen::MatrixXd comm = f * d * overlap - overlap * d * f;
    comm_max = comm.cwiseAbs().maxCoeff();
    const double de = std::abs(energy - e_prev);
    if (comm_max < opts.commutator_tol && (iter > 1 || guess) && de < opts.energy_tol) {
      diagonalize(f, c, eps);
      sol.mo_coeffs = c;
      sol.mo_energies = eps;
      sol.density = d;
      sol.fock = f;
      sol.e_electronic = energy;
      sol.e_total = energy + e_nuc;
      sol.converged = true;
      sol.n_iterations = iter;
      sol.commutator = comm_max;
      return sol;
    }
    e_prev = energy;
    const Eigen::MatrixXd f_next =
        diis.extrapolate(f, x.transpose() * comm * x);
    diagonalize(f_next, c, eps);
    d = density_of(c);
  }
  throw ConvergenceError("RHF did not converge in " + std::to_string(opts.max_iter) +
                             " iterations (last energy " + std::to_string(energy + e_nuc) +
                             ", commutator " + std::to_string(comm_max) + ")",
                         energy + e_nuc, comm_max);
}

ScfSolution run_rhf(const IntegralSet& ints, int n_electrons, const ScfOptions& opts) {
  return run_rhf(ints.overlap, ints.h_core, ints.eri, ints.e_nuc, n_electrons, opts);
}

LocalizedRdm localized_rdm(const ScfSolution& scf, const Eigen::MatrixXd& x,
                           const Eigen::MatrixXd& overlap) {
  if (!scf.converged) throw Error("localized_rdm needs a converged SCF solution");
  // S^{1/2} = X S for X = S^{-1/2}.
  const Eigen::MatrixXd c_loc = (x * overlap) * scf.mo_coeffs.leftCols(scf.n_occ);
  LocalizedRdm out;
  out.x = x;
  out.gamma = c_loc * c_loc.transpose();
  return out;
}

}  // namespace qembed
