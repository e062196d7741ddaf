#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qembed/dmet.hpp"
#include "qembed/vqe.hpp"

namespace qembed {

inline constexpr const char* kVacuum = "vacuum";

struct LigandEntry {
  std::string id;
  std::filesystem::path xyz;
  int charge = 0;
  std::vector<std::vector<std::size_t>> fragments;  // atom indices, 0-based
  std::string protein = kVacuum;  // charge file or "vacuum"
  std::string solvent = kVacuum;
  std::optional<double> potency;
};

/// Parsed run configuration. Paths are resolved against the config file's
/// directory.
struct RunConfig {
  std::vector<LigandEntry> ligands;
  std::vector<SolverKind> solvers;
  ActiveSpace active_space;
  std::string basis = "sto-3g";
  VqeConfig vqe;
  ChemicalPotentialOptions mu;
  std::optional<std::string> reference_ligand;
  std::vector<std::string> weak_ligands;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "qembed-out";
  std::filesystem::path base_dir = ".";

  std::filesystem::path resolve(const std::filesystem::path& p) const;
  /// Stable description of everything that determines the energy method.
  std::string method_fingerprint() const;
  void validate() const;
};

/// JSON schema documented in README. Throws ParseError / Error with the
/// offending key.
RunConfig parse_run_config(const std::string& json_text,
                           const std::filesystem::path& base_dir = ".");
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace qembed
