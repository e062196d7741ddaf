#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qembed {

inline constexpr double kBohrPerAngstrom = 1.8897259886;

struct Atom {
  std::string element;
  int nuclear_charge = 0;
  Eigen::Vector3d position;  // bohr
};

struct Molecule {
  std::vector<Atom> atoms;
  int net_charge = 0;
  int n_electrons = 0;

  std::size_t size() const { return atoms.size(); }
};

/// Builds a molecule and enforces n_electrons = sum(Z) - charge, finite
/// positions and a 1e-6 bohr minimum separation.
Molecule make_molecule(std::vector<Atom> atoms, int net_charge);

struct PointCharge {
  double charge = 0.0;  // elementary charge units
  Eigen::Vector3d position;  // bohr
};

/// Fixed external charges seen by the electrons and nuclei. Empty means vacuum.
struct PointChargeEnvironment {
  std::vector<PointCharge> charges;

  bool empty() const { return charges.empty(); }
  std::size_t size() const { return charges.size(); }
};

/// Parses XYZ text in Angstrom. Accepts the standard layout (count line,
/// comment line, atom lines) or a bare list of "El x y z" lines.
Molecule load_geometry(std::string_view xyz_text, int net_charge);
Molecule load_geometry_file(const std::filesystem::path& path, int net_charge);

/// Parses "x y z q" records (Angstrom, e). Blank lines and '#' comments are
/// skipped.
PointChargeEnvironment load_point_charges(std::string_view text);
PointChargeEnvironment load_point_charges_file(const std::filesystem::path& path);

int nuclear_charge_of(std::string_view element);

/// Rigid translation of both molecule and environment (bohr).
Molecule translated(const Molecule& mol, const Eigen::Vector3d& shift);
PointChargeEnvironment translated(const PointChargeEnvironment& env,
                                  const Eigen::Vector3d& shift);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace qembed
