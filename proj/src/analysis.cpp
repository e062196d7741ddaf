#include "qembed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qembed/error.hpp"

namespace qembed {

double binding_energy(double e_in_protein, double e_in_solvent) {
  return e_in_protein - e_in_solvent;
}

double binding_energy(double e_in_protein, const std::string& method_protein,
                      double e_in_solvent, const std::string& method_solvent) {
  if (method_protein != method_solvent)
    throw Error("legs computed with different methods: '" + method_protein + "' vs '" +
                method_solvent + "'");
  return binding_energy(e_in_protein, e_in_solvent);
}

Eigen::MatrixXd ranking_metric(const std::vector<LigandLegs>& legs, const std::string& reference) {
  auto ref = std::find_if(legs.begin(), legs.end(),
                          [&](const LigandLegs& l) { return l.id == reference; });
  if (ref == legs.end()) throw Error("reference ligand '" + reference + "' not among ligands");
  std::vector<double> e;
  for (const auto& l : legs) {
    if (!l.e_protein) throw Error("ligand '" + l.id + "' is missing its protein leg");
    if (!l.e_solvent) throw Error("ligand '" + l.id + "' is missing its solvent leg");
    if (l.protein_environment != ref->protein_environment)
      throw Error("ligand '" + l.id + "' protein leg uses '" + l.protein_environment +
                  "', not the reference environment '" + ref->protein_environment + "'");
    e.push_back(binding_energy(*l.e_protein, *l.e_solvent));
  }
  const auto n = static_cast<Eigen::Index>(e.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = e[static_cast<std::size_t>(i)] - e[static_cast<std::size_t>(j)];
  return m;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw Error("mean of an empty list");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Correlation rank_and_correlate(const std::vector<std::string>& ids,
                               const std::vector<double>& e_bind,
                               const std::vector<double>& potency) {
  if (ids.size() != e_bind.size() || ids.size() != potency.size())
    throw Error("ligand, energy and potency lists differ in length");
  if (ids.size() < 3) throw Error("correlation needs at least 3 ligands");
  Correlation c;
  c.n = ids.size();
  const double mx = mean(potency), my = mean(e_bind);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    sxx += (potency[i] - mx) * (potency[i] - mx);
    sxy += (potency[i] - mx) * (e_bind[i] - my);
    syy += (e_bind[i] - my) * (e_bind[i] - my);
  }
  if (sxx == 0.0) throw Error("potency values have zero variance");
  c.slope = sxy / sxx;
  c.intercept = my - c.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double r = e_bind[i] - (c.slope * potency[i] + c.intercept);
    ss_res += r * r;
  }
  c.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;

  std::vector<std::size_t> order(c.n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return e_bind[a] < e_bind[b]; });
  for (auto i : order) c.ordering.push_back(ids[i]);
  return c;
}

DiscriminationStats discrimination_stats(const std::vector<double>& weak,
                                         const std::vector<double>& strong) {
  if (weak.empty() || strong.empty()) throw Error("discrimination needs two non-empty groups");
  DiscriminationStats d;
  d.mean_weak = mean(weak);
  d.mean_strong = mean(strong);
  d.std_weak = sample_std(weak);
  d.std_strong = sample_std(strong);
  d.shift = d.mean_weak - d.mean_strong;
  std::size_t bad = 0;
  for (double w : weak)
    for (double s : strong)
      if (s >= w) ++bad;
  d.overlap = static_cast<double>(bad) / static_cast<double>(weak.size() * strong.size());
  return d;
}

}  // namespace qembed
