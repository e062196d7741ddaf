#pragma once

#include <cmath>
#include <sstream>
#include <string>

#include "qembed/molecule.hpp"

namespace test_support {

inline qembed::Molecule hydrogen_chain(int n, double spacing_angstrom) {
  std::ostringstream xyz;
  for (int i = 0; i < n; ++i) xyz << "H 0 0 " << spacing_angstrom * i << "\n";
  return qembed::load_geometry(xyz.str(), 0);
}

inline qembed::Molecule hydrogen_ring(int n, double bond_angstrom) {
  const double pi = 3.14159265358979323846;
  const double radius = bond_angstrom / (2.0 * std::sin(pi / n));
  std::ostringstream xyz;
  xyz.precision(12);
  for (int i = 0; i < n; ++i)
    xyz << "H " << radius * std::cos(2 * pi * i / n) << " " << radius * std::sin(2 * pi * i / n)
        << " 0\n";
  return qembed::load_geometry(xyz.str(), 0);
}

inline qembed::Molecule h2_bohr(double r_bohr) {
  std::ostringstream xyz;
  xyz.precision(17);
  xyz << "H 0 0 0\nH 0 0 " << r_bohr / qembed::kBohrPerAngstrom << "\n";
  return qembed::load_geometry(xyz.str(), 0);
}

inline const char* water_xyz() {
  return "3\nwater\nO 0.000000 0.000000 0.117790\nH 0.000000 0.755453 -0.471161\n"
         "H 0.000000 -0.755453 -0.471161\n";
}

inline std::string data_path(const std::string& rel) { return std::string(QEMBED_DATA_DIR) + "/" + rel; }

}  // namespace test_support
