#include "qembed/basis.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include "qembed/error.hpp"

namespace qembed {

namespace {

struct RawShell {
  int l;
  std::vector<double> exps;
  std::vector<double> coefs;
  const char* label;
};

// STO-3G contraction coefficients shared across rows.
const std::vector<double> k1s = {0.15432897, 0.53532814, 0.44463454};
const std::vector<double> k2s = {-0.09996723, 0.39951283, 0.70011547};
const std::vector<double> k2p = {0.15591627, 0.60768372, 0.39195739};

const std::map<std::string, std::vector<RawShell>>& sto3g() {
  static const std::map<std::string, std::vector<RawShell>> table = {
      {"H", {{0, {3.42525091, 0.62391373, 0.16885540}, k1s, "1s"}}},
      {"He", {{0, {6.36242139, 1.15892300, 0.31364979}, k1s, "1s"}}},
      {"C",
       {{0, {71.6168370, 13.0450960, 3.53051220}, k1s, "1s"},
        {0, {2.94124940, 0.68348310, 0.22228990}, k2s, "2s"},
        {1, {2.94124940, 0.68348310, 0.22228990}, k2p, "2p"}}},
      {"N",
       {{0, {99.1061690, 18.0523120, 4.88566020}, k1s, "1s"},
        {0, {3.78045590, 0.87849660, 0.28571440}, k2s, "2s"},
        {1, {3.78045590, 0.87849660, 0.28571440}, k2p, "2p"}}},
      {"O",
       {{0, {130.709320, 23.8088610, 6.44360830}, k1s, "1s"},
        {0, {5.03315130, 1.16959610, 0.38038900}, k2s, "2s"},
        {1, {5.03315130, 1.16959610, 0.38038900}, k2p, "2p"}}},
      {"F",
       {{0, {166.679130, 30.3608120, 8.21682070}, k1s, "1s"},
        {0, {6.46480320, 1.50228120, 0.48858850}, k2s, "2s"},
        {1, {6.46480320, 1.50228120, 0.48858850}, k2p, "2p"}}},
      {"S",
       {{0, {533.1257359, 97.1095183, 26.28162542},
         {0.1543289673, 0.5353281423, 0.4446345422}, "1s"},
        {0, {33.32975173, 7.745117521, 2.518952599},
         {-0.09996722919, 0.3995128261, 0.7001154689}, "2s"},
        {0, {2.029194274, 0.5661400518, 0.2215833792},
         {-0.219620369, 0.2255954336, 0.900398426}, "3s"},
        {1, {33.32975173, 7.745117521, 2.518952599},
         {0.155916275, 0.6076837186, 0.3919573931}, "2p"},
        {1, {2.029194274, 0.5661400518, 0.2215833792},
         {0.01058760429, 0.5951670053, 0.462001012}, "3p"}}},
  };
  return table;
}

double primitive_norm(int l, double alpha) {
  // Cartesian component with powers summing to l <= 1: double factorials are 1.
  return std::pow(2.0 * alpha / std::numbers::pi, 0.75) * std::pow(4.0 * alpha, 0.5 * l);
}

void normalize_contraction(Shell& sh) {
  const auto n = sh.exponents.size();
  for (std::size_t k = 0; k < n; ++k)
    sh.coefficients[k] *= primitive_norm(sh.l, sh.exponents[k]);
  double self = 0.0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      double p = sh.exponents[a] + sh.exponents[b];
      double s = std::pow(std::numbers::pi / p, 1.5);
      if (sh.l == 1) s *= 0.5 / p;
      self += sh.coefficients[a] * sh.coefficients[b] * s;
    }
  double scale = 1.0 / std::sqrt(self);
  for (auto& c : sh.coefficients) c *= scale;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::array<int, 3> cartesian_powers(int l, int k) {
  if (l == 0) return {0, 0, 0};
  if (l == 1) {
    std::array<int, 3> p{0, 0, 0};
    p[static_cast<std::size_t>(k)] = 1;
    return p;
  }
  throw Error("only s and p shells are supported");
}

BasisSet build_basis(const Molecule& mol, std::string_view name) {
  if (lower(name) != "sto-3g")
    throw Error("unsupported basis set '" + std::string(name) + "'");
  BasisSet basis;
  basis.name = "sto-3g";
  const auto& table = sto3g();
  for (std::size_t ia = 0; ia < mol.atoms.size(); ++ia) {
    const auto& atom = mol.atoms[ia];
    auto it = table.find(atom.element);
    if (it == table.end())
      throw Error("element '" + atom.element + "' has no sto-3g parameters");
    // s shells first, then p shells, each in table order.
    for (int l : {0, 1}) {
      for (const auto& raw : it->second) {
        if (raw.l != l) continue;
        Shell sh;
        sh.atom = ia;
        sh.l = raw.l;
        sh.center = atom.position;
        sh.exponents = raw.exps;
        sh.coefficients = raw.coefs;
        normalize_contraction(sh);
        basis.shell_offset.push_back(basis.n_ao);
        for (int k = 0; k < sh.n_functions(); ++k) {
          basis.ao_atom.push_back(ia);
          std::string label = atom.element + std::to_string(ia) + " " + raw.label;
          if (l == 1) label += "xyz"[k];
          basis.ao_labels.push_back(label);
        }
        basis.n_ao += static_cast<std::size_t>(sh.n_functions());
        basis.shells.push_back(std::move(sh));
      }
    }
  }
  return basis;
}

}  // namespace qembed
