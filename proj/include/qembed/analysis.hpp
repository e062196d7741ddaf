#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

namespace qembed {

/// E_bind = E(ligand in protein) - E(ligand in solvent); negative binds.
double binding_energy(double e_in_protein, double e_in_solvent);

/// Same, refusing legs computed with different methods.
double binding_energy(double e_in_protein, const std::string& method_protein,
                      double e_in_solvent, const std::string& method_solvent);

struct LigandLegs {
  std::string id;
  std::optional<double> e_protein;
  std::optional<double> e_solvent;
  std::string protein_environment;  // label of the charge set used
};

/// m(i, j) = E_bind(i) - E_bind(j), with every protein leg required to use
/// the reference ligand's environment.
Eigen::MatrixXd ranking_metric(const std::vector<LigandLegs>& legs, const std::string& reference);

struct Correlation {
  std::vector<std::string> ordering;  // ascending E_bind
  double r2 = 0.0;
  double slope = 0.0;  // E_bind = slope * potency + intercept
  double intercept = 0.0;
  std::size_t n = 0;
};

/// Least-squares line of E_bind against potency. Needs n >= 3 and
/// non-constant potency.
Correlation rank_and_correlate(const std::vector<std::string>& ids,
                               const std::vector<double>& e_bind,
                               const std::vector<double>& potency);

struct DiscriminationStats {
  double mean_weak = 0.0;
  double std_weak = 0.0;
  double mean_strong = 0.0;
  double std_strong = 0.0;
  double shift = 0.0;    // mean_weak - mean_strong
  double overlap = 0.0;  // fraction of (weak, strong) pairs with E_strong >= E_weak
};

/// Sample standard deviations; zero for single-element groups.
DiscriminationStats discrimination_stats(const std::vector<double>& weak,
                                         const std::vector<double>& strong);

double mean(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

}  // namespace qembed
