#pragma once

// Dense second-quantized operators on the full Fock space. Mode k is bit k
// of the occupation index; the sign of a_k counts occupied modes below k.
// Test-only.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qembed/tensor.hpp"

namespace oracle {

inline Eigen::MatrixXd annihilator(int mode, int n_modes) {
  const Eigen::Index dim = Eigen::Index{1} << n_modes;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    if (!((s >> mode) & 1)) continue;
    int below = 0;
    for (int k = 0; k < mode; ++k) below += (s >> k) & 1;
    a(s ^ (Eigen::Index{1} << mode), s) = (below % 2) ? -1.0 : 1.0;
  }
  return a;
}

struct FockHamiltonian {
  int n_modes = 0;
  Eigen::MatrixXd h;  // full Fock-space matrix
  std::vector<Eigen::MatrixXd> a;
};

// Applies a (dagger = false) or a+ (dagger = true) to an occupation bitstring.
// Returns false when the result vanishes.
inline bool apply_ladder(std::uint64_t& state, double& sign, int mode, bool dagger) {
  const std::uint64_t bit = std::uint64_t{1} << mode;
  if (static_cast<bool>(state & bit) == dagger) return false;
  if (__builtin_popcountll(state & (bit - 1)) % 2) sign = -sign;
  state ^= bit;
  return true;
}

// Spin orbital of spatial orbital p and spin s is mode s * n + p (block order).
inline FockHamiltonian build(const Eigen::MatrixXd& h1, const qembed::Eri& eri, double constant) {
  const int n = static_cast<int>(h1.rows());
  FockHamiltonian f;
  f.n_modes = 2 * n;
  for (int k = 0; k < f.n_modes; ++k) f.a.push_back(annihilator(k, f.n_modes));
  const Eigen::Index dim = Eigen::Index{1} << f.n_modes;
  f.h = constant * Eigen::MatrixXd::Identity(dim, dim);
  auto mode = [n](int p, int s) { return s * n + p; };
  for (Eigen::Index col = 0; col < dim; ++col) {
    const auto ket = static_cast<std::uint64_t>(col);
    for (int s = 0; s < 2; ++s)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          if (h1(p, q) == 0.0) continue;
          std::uint64_t st = ket;
          double sign = 1.0;
          if (!apply_ladder(st, sign, mode(q, s), false) || !apply_ladder(st, sign, mode(p, s), true)) continue;
          f.h(static_cast<Eigen::Index>(st), col) += sign * h1(p, q);
        }
    for (int s = 0; s < 2; ++s)
      for (int t = 0; t < 2; ++t)
        for (int p = 0; p < n; ++p)
          for (int q = 0; q < n; ++q)
            for (int r = 0; r < n; ++r)
              for (int u = 0; u < n; ++u) {
                const double v = eri(static_cast<std::size_t>(p), static_cast<std::size_t>(q),
                                     static_cast<std::size_t>(r), static_cast<std::size_t>(u));
                if (std::abs(v) < 1e-14) continue;
                std::uint64_t st = ket;
                double sign = 1.0;
                if (!apply_ladder(st, sign, mode(q, s), false) || !apply_ladder(st, sign, mode(u, t), false) ||
                    !apply_ladder(st, sign, mode(r, t), true) || !apply_ladder(st, sign, mode(p, s), true))
                  continue;
                f.h(static_cast<Eigen::Index>(st), col) += 0.5 * sign * v;
              }
  }
  return f;
}

inline std::vector<Eigen::Index> sector(int n_spatial, int n_alpha, int n_beta) {
  std::vector<Eigen::Index> out;
  const Eigen::Index dim = Eigen::Index{1} << (2 * n_spatial);
  const Eigen::Index mask = (Eigen::Index{1} << n_spatial) - 1;
  for (Eigen::Index s = 0; s < dim; ++s)
    if (__builtin_popcountll(static_cast<unsigned long long>(s & mask)) == n_alpha &&
        __builtin_popcountll(static_cast<unsigned long long>(s >> n_spatial)) == n_beta)
      out.push_back(s);
  return out;
}

struct GroundState {
  double energy = 0.0;
  Eigen::VectorXd vector;  // full Fock space
};

inline GroundState ground_state(const FockHamiltonian& f, int n_alpha, int n_beta) {
  const auto idx = sector(f.n_modes / 2, n_alpha, n_beta);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      sub(i, j) = f.h(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  GroundState g;
  g.energy = es.eigenvalues()(0);
  g.vector = Eigen::VectorXd::Zero(f.h.rows());
  for (Eigen::Index i = 0; i < m; ++i) g.vector(idx[static_cast<std::size_t>(i)]) = es.eigenvectors()(i, 0);
  return g;
}

// Spin-summed 1-RDM and 2-RDM with G(p,q,r,s) = sum <a+_ps a+_rt a_st a_qs>.
inline std::pair<Eigen::MatrixXd, qembed::Eri> rdms(const FockHamiltonian& f, const Eigen::VectorXd& psi) {
  const int n = f.n_modes / 2;
  const auto un = static_cast<std::size_t>(n);
  auto mode = [n](int p, int s) { return static_cast<std::size_t>(s * n + p); };
  Eigen::MatrixXd g1 = Eigen::MatrixXd::Zero(n, n);
  qembed::Eri g2(un);
  std::vector<Eigen::VectorXd> a_psi(static_cast<std::size_t>(f.n_modes));
  for (int k = 0; k < f.n_modes; ++k) a_psi[static_cast<std::size_t>(k)] = f.a[static_cast<std::size_t>(k)] * psi;
  for (int s = 0; s < 2; ++s)
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) g1(p, q) += a_psi[mode(p, s)].dot(a_psi[mode(q, s)]);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      for (int p = 0; p < n; ++p)
        for (int r = 0; r < n; ++r) {
          const Eigen::VectorXd left = f.a[mode(r, t)] * a_psi[mode(p, s)];
          for (int q = 0; q < n; ++q)
            for (int u = 0; u < n; ++u) {
              const Eigen::VectorXd right = f.a[mode(u, t)] * a_psi[mode(q, s)];
              g2(static_cast<std::size_t>(p), static_cast<std::size_t>(q), static_cast<std::size_t>(r),
                 static_cast<std::size_t>(u)) += left.dot(right);
            }
        }
  return {g1, g2};
}

}  // namespace oracle
