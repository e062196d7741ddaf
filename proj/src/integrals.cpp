#include "qembed/integrals.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "qembed/error.hpp"

namespace qembed {

namespace {

constexpr int kMaxL = 1;
constexpr int kMaxHermite = 4 * kMaxL;  // (pp|pp)

// One Cartesian direction of the Hermite expansion of a Gaussian product.
// e(i, j, t) for i <= la, j <= lb (+2 headroom for kinetic), t <= i + j.
class Hermite1D {
 public:
  static constexpr int kDim = kMaxL + 3;
  static constexpr int kT = 2 * kDim;

  Hermite1D(int la, int lb, double a, double b, double ab) {
    const double p = a + b;
    const double mu = a * b / p;
    const double xpa = -b / p * ab;  // ab = A - B
    const double xpb = a / p * ab;
    const double half_p = 0.5 / p;
    e_.fill(0.0);
    at(0, 0, 0) = std::exp(-mu * ab * ab);
    for (int i = 0; i <= la; ++i) {
      for (int j = 0; j <= lb; ++j) {
        if (i == 0 && j == 0) continue;
        for (int t = 0; t <= i + j; ++t) {
          double v = 0.0;
          if (j == 0) {
            if (t > 0) v += half_p * at(i - 1, 0, t - 1);
            v += xpa * at(i - 1, 0, t);
            v += (t + 1) * at(i - 1, 0, t + 1);
          } else {
            if (t > 0) v += half_p * at(i, j - 1, t - 1);
            v += xpb * at(i, j - 1, t);
            v += (t + 1) * at(i, j - 1, t + 1);
          }
          at(i, j, t) = v;
        }
      }
    }
  }

  double operator()(int i, int j, int t) const {
    if (t < 0 || t > i + j) return 0.0;
    return e_[static_cast<std::size_t>((i * kDim + j) * kT + t)];
  }

 private:
  // t + 1 <= i + j + 1 < kT, so reads past the valid range hit zeros.
  double& at(int i, int j, int t) {
    return e_[static_cast<std::size_t>((i * kDim + j) * kT + t)];
  }
  double at(int i, int j, int t) const { return (*this)(i, j, t); }

  std::array<double, kDim * kDim * kT> e_{};
};

// Hermite Coulomb integrals R^0_{tuv} for t+u+v <= l_total.
class HermiteCoulomb {
 public:
  static constexpr int kN = kMaxHermite + 1;

  HermiteCoulomb(int l_total, double alpha, const Eigen::Vector3d& pc) {
    std::array<double, kN> boys{};
    boys_function(l_total, alpha * pc.squaredNorm(), boys.data());
    // r_[n] holds R^n; fill from the highest auxiliary order down.
    double pref = 1.0;
    std::array<double, kN> scaled{};
    for (int n = 0; n <= l_total; ++n) {
      scaled[static_cast<std::size_t>(n)] = pref * boys[static_cast<std::size_t>(n)];
      pref *= -2.0 * alpha;
    }
    for (int n = l_total; n >= 0; --n) {
      auto& cur = r_[static_cast<std::size_t>(n)];
      cur.fill(0.0);
      cur[0] = scaled[static_cast<std::size_t>(n)];
      const int lmax = l_total - n;
      if (lmax == 0) continue;
      const auto& nxt = r_[static_cast<std::size_t>(n + 1)];
      for (int t = 0; t <= lmax; ++t)
        for (int u = 0; u + t <= lmax; ++u)
          for (int v = 0; v + u + t <= lmax; ++v) {
            if (t + u + v == 0) continue;
            double val;
            if (t > 0)
              val = (t > 1 ? (t - 1) * nxt[idx(t - 2, u, v)] : 0.0) + pc.x() * nxt[idx(t - 1, u, v)];
            else if (u > 0)
              val = (u > 1 ? (u - 1) * nxt[idx(t, u - 2, v)] : 0.0) + pc.y() * nxt[idx(t, u - 1, v)];
            else
              val = (v > 1 ? (v - 1) * nxt[idx(t, u, v - 2)] : 0.0) + pc.z() * nxt[idx(t, u, v - 1)];
            cur[idx(t, u, v)] = val;
          }
    }
  }

  double operator()(int t, int u, int v) const { return r_[0][idx(t, u, v)]; }

 private:
  static std::size_t idx(int t, int u, int v) {
    return static_cast<std::size_t>((t * kN + u) * kN + v);
  }
  std::array<std::array<double, kN * kN * kN>, kN + 1> r_{};
};

struct PrimitivePair {
  double p;
  Eigen::Vector3d center;
  double coef;  // product of contraction coefficients
  std::array<Hermite1D, 3> e;
};

PrimitivePair make_pair(const Shell& a, std::size_t ka, const Shell& b, std::size_t kb,
                        int extra_b = 0) {
  const double ea = a.exponents[ka];
  const double eb = b.exponents[kb];
  const Eigen::Vector3d ab = a.center - b.center;
  return PrimitivePair{ea + eb, (ea * a.center + eb * b.center) / (ea + eb),
                       a.coefficients[ka] * b.coefficients[kb],
                       {Hermite1D(a.l, b.l + extra_b, ea, eb, ab.x()),
                        Hermite1D(a.l, b.l + extra_b, ea, eb, ab.y()),
                        Hermite1D(a.l, b.l + extra_b, ea, eb, ab.z())}};
}

using Block = Eigen::Matrix<double, 3, 3>;

// Overlap and kinetic blocks between two shells.
void overlap_kinetic(const Shell& a, const Shell& b, Block& s_out, Block& t_out) {
  s_out.setZero();
  t_out.setZero();
  for (std::size_t ka = 0; ka < a.exponents.size(); ++ka)
    for (std::size_t kb = 0; kb < b.exponents.size(); ++kb) {
      const auto pp = make_pair(a, ka, b, kb, 2);
      const double eb = b.exponents[kb];
      const double root = std::sqrt(std::numbers::pi / pp.p);
      for (int ia = 0; ia < a.n_functions(); ++ia) {
        const auto pa = cartesian_powers(a.l, ia);
        for (int ib = 0; ib < b.n_functions(); ++ib) {
          const auto pb = cartesian_powers(b.l, ib);
          std::array<double, 3> s1{}, k1{};
          for (int d = 0; d < 3; ++d) {
            const int i = pa[static_cast<std::size_t>(d)];
            const int j = pb[static_cast<std::size_t>(d)];
            const auto& e = pp.e[static_cast<std::size_t>(d)];
            const double sij = e(i, j, 0) * root;
            const double sij2 = e(i, j + 2, 0) * root;
            const double sijm = j >= 2 ? e(i, j - 2, 0) * root : 0.0;
            s1[static_cast<std::size_t>(d)] = sij;
            k1[static_cast<std::size_t>(d)] =
                eb * (2 * j + 1) * sij - 2.0 * eb * eb * sij2 - 0.5 * j * (j - 1) * sijm;
          }
          s_out(ia, ib) += pp.coef * s1[0] * s1[1] * s1[2];
          t_out(ia, ib) += pp.coef * (k1[0] * s1[1] * s1[2] + s1[0] * k1[1] * s1[2] +
                                      s1[0] * s1[1] * k1[2]);
        }
      }
    }
}

// -q <a|1/r_C|b> block.
Block attraction(const Shell& a, const Shell& b, double q, const Eigen::Vector3d& c) {
  Block v = Block::Zero();
  const int l_total = a.l + b.l;
  for (std::size_t ka = 0; ka < a.exponents.size(); ++ka)
    for (std::size_t kb = 0; kb < b.exponents.size(); ++kb) {
      const auto pp = make_pair(a, ka, b, kb);
      const HermiteCoulomb r(l_total, pp.p, pp.center - c);
      const double pref = -q * 2.0 * std::numbers::pi / pp.p * pp.coef;
      for (int ia = 0; ia < a.n_functions(); ++ia) {
        const auto pa = cartesian_powers(a.l, ia);
        for (int ib = 0; ib < b.n_functions(); ++ib) {
          const auto pb = cartesian_powers(b.l, ib);
          double acc = 0.0;
          for (int t = 0; t <= pa[0] + pb[0]; ++t)
            for (int u = 0; u <= pa[1] + pb[1]; ++u)
              for (int w = 0; w <= pa[2] + pb[2]; ++w)
                acc += pp.e[0](pa[0], pb[0], t) * pp.e[1](pa[1], pb[1], u) *
                       pp.e[2](pa[2], pb[2], w) * r(t, u, w);
          v(ia, ib) += pref * acc;
        }
      }
    }
  return v;
}

// Hermite-expanded charge distribution of one primitive pair, one entry per
// Cartesian function pair: coefficients over (t,u,v).
struct HermiteDistribution {
  double p;
  Eigen::Vector3d center;
  int l_total;
  // [function pair][t][u][v], dims (l_total+1)^3
  std::vector<std::vector<double>> coeff;
};

std::vector<HermiteDistribution> distributions(const Shell& a, const Shell& b) {
  std::vector<HermiteDistribution> out;
  const int l_total = a.l + b.l;
  const int dim = l_total + 1;
  for (std::size_t ka = 0; ka < a.exponents.size(); ++ka)
    for (std::size_t kb = 0; kb < b.exponents.size(); ++kb) {
      const auto pp = make_pair(a, ka, b, kb);
      HermiteDistribution hd{pp.p, pp.center, l_total, {}};
      for (int ia = 0; ia < a.n_functions(); ++ia) {
        const auto pa = cartesian_powers(a.l, ia);
        for (int ib = 0; ib < b.n_functions(); ++ib) {
          const auto pb = cartesian_powers(b.l, ib);
          std::vector<double> c(static_cast<std::size_t>(dim * dim * dim), 0.0);
          for (int t = 0; t <= pa[0] + pb[0]; ++t)
            for (int u = 0; u <= pa[1] + pb[1]; ++u)
              for (int w = 0; w <= pa[2] + pb[2]; ++w)
                c[static_cast<std::size_t>((t * dim + u) * dim + w)] =
                    pp.coef * pp.e[0](pa[0], pb[0], t) * pp.e[1](pa[1], pb[1], u) *
                    pp.e[2](pa[2], pb[2], w);
          hd.coeff.push_back(std::move(c));
        }
      }
      out.push_back(std::move(hd));
    }
  return out;
}

}  // namespace

void boys_function(int m_max, double t, double* out) {
  if (t < 35.0) {
    // Series for the top order, downward recursion for the rest.
    const double et = std::exp(-t);
    double term = 1.0 / (2 * m_max + 1);
    double sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= 2.0 * t / (2 * m_max + 2 * k + 1);
      sum += term;
      if (term < 1e-17 * sum) break;
    }
    out[m_max] = et * sum;
    for (int m = m_max; m > 0; --m) out[m - 1] = (2.0 * t * out[m] + et) / (2 * m - 1);
  } else {
    const double et = std::exp(-t);
    out[0] = 0.5 * std::sqrt(std::numbers::pi / t) * std::erf(std::sqrt(t));
    for (int m = 0; m < m_max; ++m) out[m + 1] = ((2 * m + 1) * out[m] - et) / (2.0 * t);
  }
}

double nuclear_repulsion(const Molecule& mol, const PointChargeEnvironment& env) {
  double e = 0.0;
  for (std::size_t i = 0; i < mol.atoms.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j)
      e += mol.atoms[i].nuclear_charge * mol.atoms[j].nuclear_charge /
           (mol.atoms[i].position - mol.atoms[j].position).norm();
    for (const auto& c : env.charges)
      e += mol.atoms[i].nuclear_charge * c.charge / (mol.atoms[i].position - c.position).norm();
  }
  return e;
}

Eigen::MatrixXd point_charge_attraction(const BasisSet& basis, double q,
                                        const Eigen::Vector3d& center) {
  const auto n = static_cast<Eigen::Index>(basis.n_ao);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < basis.shells.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const auto& a = basis.shells[i];
      const auto& b = basis.shells[j];
      Block blk = attraction(a, b, q, center);
      for (int ia = 0; ia < a.n_functions(); ++ia)
        for (int ib = 0; ib < b.n_functions(); ++ib) {
          auto r = static_cast<Eigen::Index>(basis.shell_offset[i]) + ia;
          auto c = static_cast<Eigen::Index>(basis.shell_offset[j]) + ib;
          v(r, c) = blk(ia, ib);
          v(c, r) = blk(ia, ib);
        }
    }
  return v;
}

IntegralSet compute_integrals(const Molecule& mol, const BasisSet& basis,
                              const PointChargeEnvironment& env) {
  for (const auto& sh : basis.shells) {
    if (sh.l > kMaxL) throw Error("angular momentum above p is not supported");
    if (sh.atom >= mol.atoms.size()) throw Error("basis does not match molecule");
  }
  const auto n = static_cast<Eigen::Index>(basis.n_ao);
  const auto& shells = basis.shells;
  const auto off = [&](std::size_t s) { return static_cast<Eigen::Index>(basis.shell_offset[s]); };

  IntegralSet ints;
  ints.overlap = Eigen::MatrixXd::Zero(n, n);
  ints.kinetic = Eigen::MatrixXd::Zero(n, n);
  ints.nuclear = Eigen::MatrixXd::Zero(n, n);
  ints.external = Eigen::MatrixXd::Zero(n, n);

  for (std::size_t i = 0; i < shells.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const auto& a = shells[i];
      const auto& b = shells[j];
      Block s, t;
      overlap_kinetic(a, b, s, t);
      Block v = Block::Zero();
      for (const auto& atom : mol.atoms)
        v += attraction(a, b, atom.nuclear_charge, atom.position);
      Block x = Block::Zero();
      for (const auto& c : env.charges) x += attraction(a, b, c.charge, c.position);
      for (int ia = 0; ia < a.n_functions(); ++ia)
        for (int ib = 0; ib < b.n_functions(); ++ib) {
          const auto r = off(i) + ia;
          const auto c = off(j) + ib;
          ints.overlap(r, c) = ints.overlap(c, r) = s(ia, ib);
          ints.kinetic(r, c) = ints.kinetic(c, r) = t(ia, ib);
          ints.nuclear(r, c) = ints.nuclear(c, r) = v(ia, ib);
          ints.external(r, c) = ints.external(c, r) = x(ia, ib);
        }
    }
  ints.h_core = ints.kinetic + ints.nuclear + ints.external;
  ints.e_nuc = nuclear_repulsion(mol, env);

  // Two-electron integrals over unique shell quartets, scattered 8-fold.
  std::vector<std::vector<HermiteDistribution>> pair_dist(shells.size() * shells.size());
  for (std::size_t i = 0; i < shells.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) pair_dist[i * shells.size() + j] = distributions(shells[i], shells[j]);

  ints.eri = Eri(basis.n_ao);
  auto& eri = ints.eri;
  const double two_pi_52 = 2.0 * std::pow(std::numbers::pi, 2.5);
  std::vector<double> block;
  for (std::size_t i = 0; i < shells.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const std::size_t ij = i * (i + 1) / 2 + j;
      const auto& dab = pair_dist[i * shells.size() + j];
      const int na = shells[i].n_functions();
      const int nb = shells[j].n_functions();
      for (std::size_t k = 0; k <= i; ++k)
        for (std::size_t l = 0; l <= k; ++l) {
          const std::size_t kl = k * (k + 1) / 2 + l;
          if (kl > ij) continue;
          const auto& dcd = pair_dist[k * shells.size() + l];
          const int nc = shells[k].n_functions();
          const int nd = shells[l].n_functions();
          block.assign(static_cast<std::size_t>(na * nb * nc * nd), 0.0);
          for (const auto& h1 : dab)
            for (const auto& h2 : dcd) {
              const int ltot = h1.l_total + h2.l_total;
              const double alpha = h1.p * h2.p / (h1.p + h2.p);
              const HermiteCoulomb r(ltot, alpha, h1.center - h2.center);
              const double pref = two_pi_52 / (h1.p * h2.p * std::sqrt(h1.p + h2.p));
              const int d1 = h1.l_total + 1;
              const int d2 = h2.l_total + 1;
              for (int f1 = 0; f1 < na * nb; ++f1) {
                const auto& c1 = h1.coeff[static_cast<std::size_t>(f1)];
                for (int f2 = 0; f2 < nc * nd; ++f2) {
                  const auto& c2 = h2.coeff[static_cast<std::size_t>(f2)];
                  double acc = 0.0;
                  for (int t = 0; t < d1; ++t)
                    for (int u = 0; u < d1; ++u)
                      for (int v = 0; v < d1; ++v) {
                        const double e1 = c1[static_cast<std::size_t>((t * d1 + u) * d1 + v)];
                        if (e1 == 0.0) continue;
                        double inner = 0.0;
                        for (int tau = 0; tau < d2; ++tau)
                          for (int nu = 0; nu < d2; ++nu)
                            for (int phi = 0; phi < d2; ++phi) {
                              const double e2 =
                                  c2[static_cast<std::size_t>((tau * d2 + nu) * d2 + phi)];
                              if (e2 == 0.0) continue;
                              const double sign = ((tau + nu + phi) & 1) ? -1.0 : 1.0;
                              inner += sign * e2 * r(t + tau, u + nu, v + phi);
                            }
                        acc += e1 * inner;
                      }
                  block[static_cast<std::size_t>(f1 * nc * nd + f2)] += pref * acc;
                }
              }
            }
          for (int ia = 0; ia < na; ++ia)
            for (int ib = 0; ib < nb; ++ib)
              for (int ic = 0; ic < nc; ++ic)
                for (int id = 0; id < nd; ++id) {
                  const double val =
                      block[static_cast<std::size_t>((ia * nb + ib) * nc * nd + ic * nd + id)];
                  const auto p = static_cast<std::size_t>(off(i) + ia);
                  const auto q = static_cast<std::size_t>(off(j) + ib);
                  const auto r = static_cast<std::size_t>(off(k) + ic);
                  const auto s = static_cast<std::size_t>(off(l) + id);
                  eri(p, q, r, s) = eri(q, p, r, s) = eri(p, q, s, r) = eri(q, p, s, r) = val;
                  eri(r, s, p, q) = eri(s, r, p, q) = eri(r, s, q, p) = eri(s, r, q, p) = val;
                }
        }
    }
  return ints;
}

}  // namespace qembed
