#include "qembed/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace qembed {

namespace {

// Each column of `in` is a pair block stored as flat [r*n+s]; returns the
// matrix whose columns hold sum_rs C_rk C_sl block[r,s] at flat [k*m+l].
Eigen::MatrixXd half_transform_rows(const Eigen::MatrixXd& in, std::size_t n,
                                    const Eigen::MatrixXd& c) {
  const auto m = static_cast<std::size_t>(c.cols());
  const auto cols = in.cols();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m * m), cols);
  Eigen::MatrixXd block(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index col = 0; col < cols; ++col) {
    Eigen::Map<const Eigen::MatrixXd> b(in.col(col).data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
    Eigen::MatrixXd t = c.transpose() * b * c;  // (j, i) layout
    Eigen::Map<Eigen::MatrixXd>(out.col(col).data(), static_cast<Eigen::Index>(m),
                                static_cast<Eigen::Index>(m)) = t;
  }
  return out;
}

}  // namespace

Eri transform(const Eri& eri, const Eigen::MatrixXd& c) {
  const std::size_t n = eri.dim();
  const auto m = static_cast<std::size_t>(c.cols());
  // The column-major view has rows (rs) and columns (pq).
  Eigen::MatrixXd step = half_transform_rows(eri.as_matrix(), n, c);  // rows (kl)
  Eigen::MatrixXd step_t = step.transpose();                           // rows (pq)
  Eigen::MatrixXd done = half_transform_rows(step_t, n, c);           // rows (ij)
  Eri out(m);
  out.as_matrix() = done.transpose();
  return out;
}

double max_symmetry_violation(const Eri& eri) {
  const std::size_t n = eri.dim();
  double worst = 0.0;
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t q = 0; q < n; ++q)
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t s = 0; s < n; ++s) {
          double v = eri(p, q, r, s);
          worst = std::max({worst, std::abs(v - eri(q, p, r, s)),
                            std::abs(v - eri(p, q, s, r)), std::abs(v - eri(r, s, p, q))});
        }
  return worst;
}

Eigen::MatrixXd coulomb(const Eri& eri, const Eigen::MatrixXd& d) {
  const auto n = static_cast<Eigen::Index>(eri.dim());
  Eigen::Map<const Eigen::VectorXd> dv(d.data(), n * n);
  // Flat index (pq)*n^2+(rs): column-major matrix M(rs, pq). J_pq = sum_rs M(rs,pq) D_rs.
  // d is column-major so dv[(s*n+r)] = D_rs; symmetric D makes the order moot.
  Eigen::VectorXd jv = eri.as_matrix().transpose() * dv;
  Eigen::MatrixXd j(n, n);
  for (Eigen::Index p = 0; p < n; ++p)
    for (Eigen::Index q = 0; q < n; ++q) j(p, q) = jv(p * n + q);
  return j;
}

Eigen::MatrixXd exchange(const Eri& eri, const Eigen::MatrixXd& d) {
  const std::size_t n = eri.dim();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t p = 0; p < n; ++p)
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t q = 0; q < n; ++q) {
        double acc = 0.0;
        for (std::size_t s = 0; s < n; ++s)
          acc += eri(p, r, q, s) * d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
        k(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) += acc;
      }
  return k;
}

}  // namespace qembed
