#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "qembed/analysis.hpp"

namespace qembed {

struct FragmentReport {
  std::string solver;
  int n_orbitals = 0;  // fragment orbitals
  int n_bath = 0;
  int n_elec_emb = 0;
  double e_frag = 0.0;
  double n_elec_on_fragment = 0.0;
  double e_solver = 0.0;
  double e_reference = 0.0;
  double e_corr = 0.0;
  double std_error = 0.0;
  double survival_fraction = 1.0;
  bool positive_e_corr = false;
};

struct LegReport {
  std::string environment;  // charge file label or "vacuum"
  int n_charges = 0;
  std::string method;
  double e_total = 0.0;
  double e_hf = 0.0;
  double e_nuc = 0.0;
  double mu = 0.0;
  int n_electrons = 0;
  double e_corr = 0.0;     // sum over fragments
  double std_error = 0.0;  // fragment errors in quadrature
  std::vector<FragmentReport> fragments;
  std::vector<std::pair<double, double>> mu_trace;
};

struct LigandReport {
  std::string id;
  bool ok = false;
  std::string error;
  std::optional<double> potency;
  std::optional<LegReport> protein;
  std::optional<LegReport> solvent;
  std::optional<double> e_bind;
};

struct AggregateReport {
  std::optional<std::string> reference;
  std::vector<std::string> matrix_ligands;
  std::vector<std::vector<double>> ranking_matrix;
  std::optional<Correlation> correlation;
  std::vector<std::string> weak;
  std::optional<DiscriminationStats> discrimination;
};

struct BindingReport {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<std::string> notes;
  std::vector<LigandReport> ligands;
  AggregateReport aggregate;

  bool all_ok() const;
};

std::string report_to_json(const BindingReport& report);
BindingReport report_from_json(const std::string& text);

std::string binding_csv(const BindingReport& report);
std::string fragments_csv(const BindingReport& report);
std::string scatter_csv(const BindingReport& report);
std::string summary_text(const BindingReport& report);

/// report.json, binding.csv, fragments.csv, scatter.csv, summary.txt.
void write_report(const BindingReport& report, const std::filesystem::path& dir);

/// Adds ranking, correlation and discrimination statistics from the
/// per-ligand entries. Sections whose inputs are missing stay empty.
void fill_aggregate(BindingReport& report, const std::optional<std::string>& reference,
                    const std::vector<std::string>& weak);

}  // namespace qembed
