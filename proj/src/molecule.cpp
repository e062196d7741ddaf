#include "qembed/molecule.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qembed/error.hpp"

namespace qembed {

namespace {

constexpr std::array<std::string_view, 18> kElements = {
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F",
    "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar"};

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& s, double& value) {
  try {
    std::size_t used = 0;
    value = std::stod(s, &used);
    return used == s.size() && std::isfinite(value);
  } catch (const std::exception&) {
    return false;
  }
}

std::string_view strip_comment(std::string_view line) {
  auto hash = line.find('#');
  if (hash != std::string_view::npos) line = line.substr(0, hash);
  return line;
}

bool is_blank(std::string_view line) {
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

Atom parse_atom_line(std::string_view line, std::size_t line_no) {
  auto f = split_fields(line);
  if (f.size() < 4)
    throw ParseError("expected 'element x y z', got '" + std::string(line) + "'",
                     line_no);
  std::array<double, 3> xyz{};
  for (int k = 0; k < 3; ++k)
    if (!parse_double(f[k + 1], xyz[k]))
      throw ParseError("non-numeric coordinate '" + f[k + 1] + "'", line_no);
  std::string el = f[0];
  // Accept "c", "CL" etc.; canonical form is capitalized.
  for (auto& ch : el) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (!el.empty()) el[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(el[0])));
  int z = 0;
  try {
    z = nuclear_charge_of(el);
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
  Atom a;
  a.element = el;
  a.nuclear_charge = z;
  a.position = Eigen::Vector3d(xyz[0], xyz[1], xyz[2]) * kBohrPerAngstrom;
  return a;
}

}  // namespace

int nuclear_charge_of(std::string_view element) {
  for (std::size_t i = 0; i < kElements.size(); ++i)
    if (kElements[i] == element) return static_cast<int>(i + 1);
  throw Error("unknown element '" + std::string(element) + "'");
}

Molecule make_molecule(std::vector<Atom> atoms, int net_charge) {
  if (atoms.empty()) throw Error("molecule has no atoms");
  int total_z = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!atoms[i].position.allFinite())
      throw Error("atom " + std::to_string(i) + " has a non-finite position");
    for (std::size_t j = 0; j < i; ++j)
      if ((atoms[i].position - atoms[j].position).norm() < 1e-6)
        throw Error("atoms " + std::to_string(j) + " and " + std::to_string(i) +
                    " coincide");
    total_z += atoms[i].nuclear_charge;
  }
  int n_elec = total_z - net_charge;
  if (n_elec < 0) throw Error("net charge exceeds total nuclear charge");
  Molecule mol;
  mol.atoms = std::move(atoms);
  mol.net_charge = net_charge;
  mol.n_electrons = n_elec;
  return mol;
}

Molecule load_geometry(std::string_view xyz_text, int net_charge) {
  auto lines = split_lines(xyz_text);
  std::size_t first = 0;
  while (first < lines.size() && is_blank(lines[first])) ++first;
  if (first == lines.size()) throw ParseError("empty geometry", 0);

  std::vector<Atom> atoms;
  auto head = split_fields(lines[first]);
  bool counted = head.size() == 1 &&
                 head[0].find_first_not_of("0123456789") == std::string::npos;
  if (counted) {
    std::size_t count = std::stoul(head[0]);
    if (count == 0) throw ParseError("atom count is zero", first + 1);
    std::size_t body = first + 2;  // skip comment line
    for (std::size_t k = 0; k < count; ++k) {
      std::size_t idx = body + k;
      if (idx >= lines.size() || is_blank(lines[idx]))
        throw ParseError("expected " + std::to_string(count) + " atoms, found " +
                             std::to_string(k),
                         idx + 1);
      atoms.push_back(parse_atom_line(lines[idx], idx + 1));
    }
    for (std::size_t idx = body + count; idx < lines.size(); ++idx)
      if (!is_blank(lines[idx]))
        throw ParseError("trailing content after " + std::to_string(count) + " atoms",
                         idx + 1);
  } else {
    for (std::size_t idx = first; idx < lines.size(); ++idx) {
      if (is_blank(lines[idx])) continue;
      atoms.push_back(parse_atom_line(lines[idx], idx + 1));
    }
  }
  if (atoms.empty()) throw ParseError("geometry contains no atoms", 0);
  return make_molecule(std::move(atoms), net_charge);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Molecule load_geometry_file(const std::filesystem::path& path, int net_charge) {
  return load_geometry(read_text_file(path), net_charge);
}

PointChargeEnvironment load_point_charges(std::string_view text) {
  PointChargeEnvironment env;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = strip_comment(lines[i]);
    if (is_blank(line)) continue;
    auto f = split_fields(line);
    if (f.size() != 4)
      throw ParseError("expected 'x y z q', got " + std::to_string(f.size()) +
                           " fields",
                       i + 1);
    std::array<double, 4> v{};
    for (int k = 0; k < 4; ++k)
      if (!parse_double(f[k], v[k]))
        throw ParseError("non-numeric field '" + f[k] + "'", i + 1);
    env.charges.push_back(
        {v[3], Eigen::Vector3d(v[0], v[1], v[2]) * kBohrPerAngstrom});
  }
  return env;
}

PointChargeEnvironment load_point_charges_file(const std::filesystem::path& path) {
  return load_point_charges(read_text_file(path));
}

Molecule translated(const Molecule& mol, const Eigen::Vector3d& shift) {
  Molecule out = mol;
  for (auto& a : out.atoms) a.position += shift;
  return out;
}

PointChargeEnvironment translated(const PointChargeEnvironment& env,
                                  const Eigen::Vector3d& shift) {
  PointChargeEnvironment out = env;
  for (auto& c : out.charges) c.position += shift;
  return out;
}

}  // namespace qembed
