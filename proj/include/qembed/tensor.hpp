#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <span>
#include <vector>

namespace qembed {

/// Dense four-index tensor in chemists' order, (pq|rs) at ((p*n+q)*n+r)*n+s.
class Eri {
 public:
  Eri() = default;
  explicit Eri(std::size_t n) : n_(n), data_(n * n * n * n, 0.0) {}

  std::size_t dim() const { return n_; }
  bool empty() const { return n_ == 0; }

  double& operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }
  double operator()(std::size_t p, std::size_t q, std::size_t r, std::size_t s) const {
    return data_[((p * n_ + q) * n_ + r) * n_ + s];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Row (pq), column (rs) matrix view.
  Eigen::Map<Eigen::MatrixXd> as_matrix() {
    return {data_.data(), static_cast<Eigen::Index>(n_ * n_),
            static_cast<Eigen::Index>(n_ * n_)};
  }
  Eigen::Map<const Eigen::MatrixXd> as_matrix() const {
    return {data_.data(), static_cast<Eigen::Index>(n_ * n_),
            static_cast<Eigen::Index>(n_ * n_)};
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// (ij|kl) = sum C_pi C_qj C_rk C_sl (pq|rs); C may be rectangular.
Eri transform(const Eri& eri, const Eigen::MatrixXd& c);

/// Largest deviation from (pq|rs)=(qp|rs)=(pq|sr)=(rs|pq).
double max_symmetry_violation(const Eri& eri);

/// Coulomb J_pq = sum (pq|rs) D_rs and exchange K_pq = sum (pr|qs) D_rs.
Eigen::MatrixXd coulomb(const Eri& eri, const Eigen::MatrixXd& d);
Eigen::MatrixXd exchange(const Eri& eri, const Eigen::MatrixXd& d);

}  // namespace qembed
