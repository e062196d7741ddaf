#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qembed/config.hpp"
#include "qembed/dmet.hpp"
#include "qembed/report.hpp"

namespace qembed {

/// Everything needed to solve one energy leg of one ligand.
struct LegSetup {
  Molecule molecule;
  PointChargeEnvironment environment;
  std::string environment_label;
  BasisSet basis;
  IntegralSet integrals;
  ScfSolution scf;
  FragmentPlan plan;
  DmetSystem system;
};

LegSetup prepare_leg(const RunConfig& cfg, const LigandEntry& ligand, const std::string& env);

/// DMET with the configured solvers. VQE fragments on shot backends take mu
/// from the statevector solve and are then re-measured at that mu.
DmetResult solve_leg(const RunConfig& cfg, const LegSetup& leg, std::uint64_t stream);

LegReport run_leg(const RunConfig& cfg, const LigandEntry& ligand, const std::string& env,
                  std::uint64_t stream);

/// Both legs for every ligand, E_bind and aggregate statistics. A failing
/// ligand is recorded and the rest continue.
BindingReport run_workflow(const RunConfig& cfg);

/// Seed stream of a ligand leg; depends only on the ligand id and leg name.
std::uint64_t leg_stream(const std::string& ligand_id, const std::string& leg);

/// Active-space qubit problem of the first VQE fragment of a leg at the
/// statevector chemical potential.
struct FragmentQubitProblem {
  VqeProblem problem;
  ActiveSpaceProblem active;
  double mu = 0.0;
  std::uint64_t reference = 0b0011;
};

FragmentQubitProblem vqe_fragment_problem(const RunConfig& cfg, const LegSetup& leg);

/// Raw / PMSV / PMSV+SPAM / SPAM+PMSV energies of one fragment over seeded
/// repetitions, as CSV.
std::string mitigation_report_csv(const RunConfig& cfg, int n_runs, std::int64_t shots);

struct OracleCheck {
  std::string name;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass() const;
};

/// Internal consistency checks on hydrogen chains: DMET limits against RHF
/// and FCI, qubit Hamiltonian spectrum against FCI, statevector VQE against
/// the active-space FCI.
std::vector<OracleCheck> run_oracle_checks();

/// Analysis of fixture CSV tables: `binding` has ligand,e_bind... columns;
/// `column` picks the energy, `delta_column` (optional) is added to it.
struct FixtureAnalysis {
  Correlation correlation;
  std::optional<DiscriminationStats> discrimination;
};

FixtureAnalysis analyze_fixture(const std::string& binding_csv, const std::string& potency_csv,
                                const std::string& column, const std::string& delta_column,
                                const std::vector<std::string>& weak);

}  // namespace qembed
