#pragma once

#include <Eigen/Core>
#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "qembed/molecule.hpp"

namespace qembed {

/// Contracted Cartesian Gaussian shell. `coefficients` already include the
/// primitive normalization and the contraction renormalization, so every
/// function of the shell has unit self-overlap.
struct Shell {
  std::size_t atom = 0;
  int l = 0;  // 0 = s, 1 = p
  Eigen::Vector3d center;
  std::vector<double> exponents;
  std::vector<double> coefficients;

  int n_functions() const { return (l + 1) * (l + 2) / 2; }
};

/// AO ordering: atom-major, s shells before p shells, p as x, y, z.
struct BasisSet {
  std::string name;
  std::vector<Shell> shells;
  std::vector<std::size_t> shell_offset;  // first AO of each shell
  std::vector<std::size_t> ao_atom;       // owning atom of each AO
  std::vector<std::string> ao_labels;     // e.g. "N1 2px"
  std::size_t n_ao = 0;
};

/// Only "sto-3g" over H, He, C, N, O, F, S.
BasisSet build_basis(const Molecule& mol, std::string_view name);

/// Cartesian exponents of component k of an l shell (x, y, z order for p).
std::array<int, 3> cartesian_powers(int l, int k);

}  // namespace qembed
