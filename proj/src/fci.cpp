#include "qembed/fci.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "qembed/error.hpp"

namespace qembed {

namespace {

using Mask = std::uint64_t;

// Applies a_p (create=false) or a+_p to `mask`; returns 0 when the result
// vanishes, otherwise the fermionic sign.
int apply(Mask& mask, int p, bool create) {
  const Mask bit = Mask{1} << p;
  if (static_cast<bool>(mask & bit) == create) return 0;
  const int sign = (std::popcount(mask & (bit - 1)) & 1) ? -1 : 1;
  mask ^= bit;
  return sign;
}

std::vector<Mask> strings(int n_orb, int n_elec) {
  std::vector<Mask> out;
  for (Mask m = 0; m < (Mask{1} << n_orb); ++m)
    if (std::popcount(m) == n_elec) out.push_back(m);
  return out;
}

Mask interleave(Mask alpha, Mask beta, int n_orb) {
  Mask m = 0;
  for (int p = 0; p < n_orb; ++p) {
    if (alpha >> p & 1) m |= Mask{1} << (2 * p);
    if (beta >> p & 1) m |= Mask{1} << (2 * p + 1);
  }
  return m;
}

class SpinOrbitalIntegrals {
 public:
  explicit SpinOrbitalIntegrals(const SpatialHamiltonian& ham) : ham_(ham) {}

  double h(int p, int q) const {
    if ((p & 1) != (q & 1)) return 0.0;
    return ham_.h(p >> 1, q >> 1);
  }
  // <pq|rs> = (pr|qs) with spin selection.
  double direct(int p, int q, int r, int s) const {
    if ((p & 1) != (r & 1) || (q & 1) != (s & 1)) return 0.0;
    return ham_.eri(static_cast<std::size_t>(p >> 1), static_cast<std::size_t>(r >> 1),
                    static_cast<std::size_t>(q >> 1), static_cast<std::size_t>(s >> 1));
  }
  double anti(int p, int q, int r, int s) const { return direct(p, q, r, s) - direct(p, q, s, r); }

 private:
  const SpatialHamiltonian& ham_;
};

std::vector<int> occupied(Mask m, int n_so) {
  std::vector<int> out;
  for (int p = 0; p < n_so; ++p)
    if (m >> p & 1) out.push_back(p);
  return out;
}

std::vector<int> virtuals(Mask m, int n_so) {
  std::vector<int> out;
  for (int p = 0; p < n_so; ++p)
    if (!(m >> p & 1)) out.push_back(p);
  return out;
}

// Lowest eigenpair of a symmetric sparse matrix.
std::pair<double, Eigen::VectorXd> davidson(const Eigen::SparseMatrix<double>& h) {
  const Eigen::Index n = h.rows();
  const Eigen::VectorXd diag = h.diagonal();
  Eigen::Index start;
  diag.minCoeff(&start);
  std::vector<Eigen::VectorXd> basis;
  std::vector<Eigen::VectorXd> sigma;
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
  guess(start) = 1.0;
  basis.push_back(guess);
  sigma.push_back(h * guess);
  constexpr int kMaxIter = 500;
  constexpr std::size_t kMaxSubspace = 48;
  Eigen::VectorXd x;
  double theta = 0.0;
  double res_norm = 0.0;
  for (int it = 0; it < kMaxIter; ++it) {
    const auto m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j <= i; ++j)
        sub(i, j) = sub(j, i) = basis[static_cast<std::size_t>(i)].dot(sigma[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
    theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd hx = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i) {
      x += y(i) * basis[static_cast<std::size_t>(i)];
      hx += y(i) * sigma[static_cast<std::size_t>(i)];
    }
    const Eigen::VectorXd r = hx - theta * x;
    res_norm = r.norm();
    if (res_norm < 1e-10) return {theta, x.normalized()};
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double denom = theta - diag(i);
      if (std::abs(denom) < 1e-8) denom = denom < 0 ? -1e-8 : 1e-8;
      t(i) = r(i) / denom;
    }
    if (basis.size() >= kMaxSubspace) {
      basis.assign(1, x.normalized());
      sigma.assign(1, h * basis.front());
    }
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) t -= b.dot(t) * b;
    const double tn = t.norm();
    if (tn < 1e-14) return {theta, x.normalized()};
    t /= tn;
    basis.push_back(t);
    sigma.push_back(h * t);
  }
  throw ConvergenceError("Davidson diagonalization did not converge", theta, res_norm);
}

}  // namespace

double energy_from_rdms(const SpatialHamiltonian& ham, const Eigen::MatrixXd& rdm1,
                        const Eri& rdm2) {
  double e = ham.constant + ham.h.cwiseProduct(rdm1).sum();
  const auto a = ham.eri.data();
  const auto b = rdm2.data();
  double two = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) two += a[i] * b[i];
  return e + 0.5 * two;
}

Eri mean_field_rdm2(const Eigen::MatrixXd& d) {
  const auto n = static_cast<std::size_t>(d.rows());
  Eri g(n);
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          const auto ip = static_cast<Eigen::Index>(p), iq = static_cast<Eigen::Index>(q),
                     ir = static_cast<Eigen::Index>(r), is = static_cast<Eigen::Index>(s);
          g(p, q, r, s) = d(ip, iq) * d(ir, is) - 0.5 * d(ip, is) * d(ir, iq);
        }
  return g;
}

FciResult solve_fci(const SpatialHamiltonian& ham, int n_alpha, int n_beta, bool compute_rdms) {
  const int n_orb = static_cast<int>(ham.n_orbitals());
  const int n_so = 2 * n_orb;
  if (static_cast<std::size_t>(n_so) > kMaxFciSpinOrbitals)
    throw Error("exact diagonalization limited to " + std::to_string(kMaxFciSpinOrbitals) +
                " spin orbitals, problem has " + std::to_string(n_so) +
                "; use an active space or the vqe solver");
  if (n_alpha < 0 || n_beta < 0 || n_alpha > n_orb || n_beta > n_orb)
    throw Error("electron count does not fit the orbital space");

  FciResult res;
  for (Mask a : strings(n_orb, n_alpha))
    for (Mask b : strings(n_orb, n_beta)) res.determinants.push_back(interleave(a, b, n_orb));
  const auto dim = static_cast<Eigen::Index>(res.determinants.size());
  std::unordered_map<Mask, Eigen::Index> index;
  index.reserve(res.determinants.size() * 2);
  for (Eigen::Index i = 0; i < dim; ++i) index[res.determinants[static_cast<std::size_t>(i)]] = i;

  const SpinOrbitalIntegrals so(ham);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Mask d = res.determinants[static_cast<std::size_t>(i)];
    const auto occ = occupied(d, n_so);
    const auto vir = virtuals(d, n_so);
    double diag = 0.0;
    for (std::size_t a = 0; a < occ.size(); ++a) {
      diag += so.h(occ[a], occ[a]);
      for (std::size_t b = 0; b < a; ++b) diag += so.anti(occ[a], occ[b], occ[a], occ[b]);
    }
    trip.emplace_back(i, i, diag + ham.constant);
    // Singles.
    for (int p : occ)
      for (int a : vir) {
        if ((p & 1) != (a & 1)) continue;
        double v = so.h(a, p);
        for (int q : occ) v += so.anti(a, q, p, q);
        if (v == 0.0) continue;
        Mask m = d;
        int sign = apply(m, p, false);
        sign *= apply(m, a, true);
        trip.emplace_back(index.at(m), i, sign * v);
      }
    // Doubles.
    for (std::size_t x = 0; x < occ.size(); ++x)
      for (std::size_t y = x + 1; y < occ.size(); ++y)
        for (std::size_t u = 0; u < vir.size(); ++u)
          for (std::size_t w = u + 1; w < vir.size(); ++w) {
            const int p = occ[x], q = occ[y], a = vir[u], b = vir[w];
            if ((p & 1) + (q & 1) != (a & 1) + (b & 1)) continue;
            const double v = so.anti(a, b, p, q);
            if (v == 0.0) continue;
            Mask m = d;
            int sign = apply(m, p, false);
            sign *= apply(m, q, false);
            sign *= apply(m, b, true);
            sign *= apply(m, a, true);
            trip.emplace_back(index.at(m), i, sign * v);
          }
  }
  Eigen::SparseMatrix<double> h(dim, dim);
  h.setFromTriplets(trip.begin(), trip.end());

  if (dim <= 1500) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
    res.energy = es.eigenvalues()(0);
    res.coefficients = es.eigenvectors().col(0);
  } else {
    auto [e, v] = davidson(h);
    res.energy = e;
    res.coefficients = v;
  }
  if (!compute_rdms) return res;

  const auto n = static_cast<std::size_t>(n_orb);
  res.rdm1 = Eigen::MatrixXd::Zero(n_orb, n_orb);
  res.rdm2 = Eri(n);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double ci = res.coefficients(i);
    if (ci == 0.0) continue;
    const Mask d = res.determinants[static_cast<std::size_t>(i)];
    const auto occ = occupied(d, n_so);
    for (int q : occ)
      for (int p = q & 1; p < n_so; p += 2) {
        Mask m = d;
        int sign = apply(m, q, false);
        sign *= apply(m, p, true);
        if (!sign) continue;
        auto it = index.find(m);
        if (it == index.end()) continue;
        res.rdm1(p >> 1, q >> 1) += sign * ci * res.coefficients(it->second);
      }
    for (int q : occ)
      for (int s : occ) {
        if (s == q) continue;
        Mask m1 = d;
        int s1 = apply(m1, q, false);
        s1 *= apply(m1, s, false);
        for (int r = s & 1; r < n_so; r += 2) {
          Mask m2 = m1;
          int s2 = apply(m2, r, true);
          if (!s2) continue;
          for (int p = q & 1; p < n_so; p += 2) {
            Mask m3 = m2;
            int s3 = apply(m3, p, true);
            if (!s3) continue;
            auto it = index.find(m3);
            if (it == index.end()) continue;
            res.rdm2(static_cast<std::size_t>(p >> 1), static_cast<std::size_t>(q >> 1),
                     static_cast<std::size_t>(r >> 1), static_cast<std::size_t>(s >> 1)) +=
                s1 * s2 * s3 * ci * res.coefficients(it->second);
          }
        }
      }
  }
  return res;
}

}  // namespace qembed
