#pragma once

#include <Eigen/Core>

#include "qembed/basis.hpp"
#include "qembed/molecule.hpp"
#include "qembed/tensor.hpp"

namespace qembed {

/// AO-basis integrals, atomic units. `h_core` contains kinetic energy plus
/// attraction to nuclei and to the external point charges. `e_nuc` contains
/// nucleus-nucleus and nucleus-charge repulsion; charge-charge self energy is
/// excluded because it is constant for a frozen environment.
struct IntegralSet {
  Eigen::MatrixXd overlap;
  Eigen::MatrixXd kinetic;
  Eigen::MatrixXd nuclear;   // attraction to the molecule's nuclei
  Eigen::MatrixXd external;  // attraction to environment charges
  Eigen::MatrixXd h_core;
  Eri eri;
  double e_nuc = 0.0;

  std::size_t n_ao() const { return static_cast<std::size_t>(overlap.rows()); }
};

IntegralSet compute_integrals(const Molecule& mol, const BasisSet& basis,
                              const PointChargeEnvironment& env = {});

/// Electronic attraction matrix of a single charge q at `center`:
/// -q <mu| 1/|r - center| |nu>.
Eigen::MatrixXd point_charge_attraction(const BasisSet& basis, double q,
                                        const Eigen::Vector3d& center);

double nuclear_repulsion(const Molecule& mol, const PointChargeEnvironment& env = {});

/// Boys function F_m(T) for m = 0..m_max.
void boys_function(int m_max, double t, double* out);

}  // namespace qembed
