#pragma once

#include <Eigen/Core>

#include "qembed/tensor.hpp"

namespace qembed {

/// Spin-free electronic Hamiltonian over orthonormal spatial orbitals:
/// constant + sum h_pq E_pq + 1/2 sum (pq|rs) (E_pq E_rs - delta_qr E_ps).
struct SpatialHamiltonian {
  double constant = 0.0;
  Eigen::MatrixXd h;
  Eri eri;

  std::size_t n_orbitals() const { return static_cast<std::size_t>(h.rows()); }
};

// RDM conventions used throughout (spin-summed):
//   rdm1(p,q)     = sum_s <a+_{p s} a_{q s}>
//   rdm2(p,q,r,s) = sum_{s,t} <a+_{p s} a+_{r t} a_{s t} a_{q s}>
// so that E = constant + sum h_pq rdm1_pq + 1/2 sum (pq|rs) rdm2_pqrs.
double energy_from_rdms(const SpatialHamiltonian& ham, const Eigen::MatrixXd& rdm1,
                        const Eri& rdm2);

/// Two-particle RDM of a closed-shell determinant with spin-summed rdm1 d:
/// d_pq d_rs - d_ps d_rq / 2.
Eri mean_field_rdm2(const Eigen::MatrixXd& rdm1);

}  // namespace qembed
