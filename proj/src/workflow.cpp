#include "qembed/workflow.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qembed/active_space.hpp"
#include "qembed/error.hpp"
#include "qembed/fci.hpp"
#include "qembed/log.hpp"
#include "qembed/vqe.hpp"

namespace qembed {

namespace {

std::optional<ActiveSpace> active_for(const RunConfig& cfg, SolverKind kind) {
  if (kind == SolverKind::MeanField) return std::nullopt;
  return cfg.active_space;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

VqeConfig statevector_copy(const VqeConfig& c) {
  VqeConfig sv = c;
  sv.backend = Backend::Statevector;
  return sv;
}

}  // namespace

std::uint64_t leg_stream(const std::string& ligand_id, const std::string& leg) {
  return fnv1a(ligand_id + "\x1f" + leg);
}

LegSetup prepare_leg(const RunConfig& cfg, const LigandEntry& ligand, const std::string& env) {
  LegSetup leg;
  leg.molecule = load_geometry_file(cfg.resolve(ligand.xyz), ligand.charge);
  leg.environment_label = env;
  if (env != kVacuum) leg.environment = load_point_charges_file(cfg.resolve(env));
  leg.basis = build_basis(leg.molecule, cfg.basis);
  leg.integrals = compute_integrals(leg.molecule, leg.basis, leg.environment);
  leg.scf = run_rhf(leg.integrals, leg.molecule.n_electrons);
  std::vector<std::optional<ActiveSpace>> actives;
  for (auto k : cfg.solvers) actives.push_back(active_for(cfg, k));
  leg.plan = define_fragments(leg.molecule, leg.basis, ligand.fragments, cfg.solvers, actives);
  leg.system = prepare_dmet(leg.integrals, leg.scf, leg.plan, leg.molecule.n_electrons);
  return leg;
}

DmetResult solve_leg(const RunConfig& cfg, const LegSetup& leg, std::uint64_t stream) {
  const auto sv = statevector_copy(cfg.vqe);
  std::vector<FragmentSolver> solvers, replacements;
  bool remeasure = false;
  for (std::size_t i = 0; i < leg.plan.size(); ++i) {
    const auto kind = leg.plan.solvers[i];
    const auto& active = leg.plan.active_spaces[i];
    if (kind == SolverKind::Vqe) {
      if (!active) throw Error("vqe fragment without an active space");
      solvers.push_back(vqe_fragment_solver(sv, *active, derive_seed(stream, {i})));
      if (cfg.vqe.uses_shots()) {
        replacements.push_back(vqe_fragment_solver(cfg.vqe, *active, derive_seed(stream, {i})));
        remeasure = true;
      } else {
        replacements.emplace_back();
      }
    } else {
      solvers.push_back(classical_solver(kind, active));
      replacements.emplace_back();
    }
  }
  DmetOptions opts;
  opts.mu = cfg.mu;
  auto result = run_dmet(leg.system, solvers, opts);
  if (remeasure) result = reevaluate_fragments(leg.system, std::move(result), replacements);
  return result;
}

LegReport run_leg(const RunConfig& cfg, const LigandEntry& ligand, const std::string& env,
                  std::uint64_t stream) {
  const auto leg = prepare_leg(cfg, ligand, env);
  const auto res = solve_leg(cfg, leg, stream);
  LegReport r;
  r.environment = env;
  r.n_charges = static_cast<int>(leg.environment.size());
  r.method = cfg.method_fingerprint();
  r.e_total = res.e_total;
  r.e_hf = leg.scf.e_total;
  r.e_nuc = leg.integrals.e_nuc;
  r.mu = res.mu;
  r.n_electrons = leg.molecule.n_electrons;
  r.mu_trace = res.mu_trace;
  double var = 0.0;
  for (std::size_t i = 0; i < res.fragments.size(); ++i) {
    const auto& f = res.fragments[i];
    const auto& b = leg.system.bases[i];
    FragmentReport fr;
    fr.solver = to_string(leg.plan.solvers[i]);
    fr.n_orbitals = static_cast<int>(b.n_frag());
    fr.n_bath = static_cast<int>(b.n_bath());
    fr.n_elec_emb = b.n_elec_emb;
    fr.e_frag = f.e_frag;
    fr.n_elec_on_fragment = f.n_elec_on_fragment;
    fr.e_solver = f.e_solver;
    fr.e_reference = f.e_reference;
    fr.e_corr = f.e_corr;
    fr.std_error = f.std_error;
    fr.survival_fraction = f.survival_fraction;
    fr.positive_e_corr = f.e_corr > 0.0;
    if (fr.positive_e_corr)
      warn("ligand " + ligand.id + ": positive correlation energy in fragment " +
           std::to_string(i) + " (" + env + ")");
    r.e_corr += f.e_corr;
    var += f.std_error * f.std_error;
    r.fragments.push_back(fr);
  }
  r.std_error = std::sqrt(var);
  return r;
}

BindingReport run_workflow(const RunConfig& cfg) {
  cfg.validate();
  BindingReport report;
  report.method = cfg.method_fingerprint();
  report.seed = cfg.seed;
  report.notes = {
      "the same geometry is used in both legs (no re-optimization)",
      "point charges enter the one-electron Hamiltonian and the nuclear repulsion; the "
      "charge-charge interaction of the environment is excluded",
      "solvent leg uses the listed environment; no implicit solvent model",
  };
  if (cfg.vqe.uses_shots())
    report.notes.push_back("vqe fragments: chemical potential from the statevector solve, "
                           "energies re-measured with the " + to_string(cfg.vqe.backend) +
                           " backend");
  for (const auto& lig : cfg.ligands) {
    LigandReport lr;
    lr.id = lig.id;
    lr.potency = lig.potency;
    try {
      lr.protein = run_leg(cfg, lig, lig.protein, derive_seed(cfg.seed, {leg_stream(lig.id, "protein")}));
      lr.solvent = run_leg(cfg, lig, lig.solvent, derive_seed(cfg.seed, {leg_stream(lig.id, "solvent")}));
      lr.e_bind = binding_energy(lr.protein->e_total, lr.protein->method, lr.solvent->e_total,
                                 lr.solvent->method);
      lr.ok = true;
    } catch (const std::exception& e) {
      lr.ok = false;
      lr.error = e.what();
      warn("ligand " + lig.id + " failed: " + e.what());
    }
    report.ligands.push_back(std::move(lr));
  }
  fill_aggregate(report, cfg.reference_ligand, cfg.weak_ligands);
  return report;
}

FragmentQubitProblem vqe_fragment_problem(const RunConfig& cfg, const LegSetup& leg) {
  std::size_t idx = leg.plan.size();
  for (std::size_t i = 0; i < leg.plan.size(); ++i)
    if (leg.plan.solvers[i] == SolverKind::Vqe) {
      idx = i;
      break;
    }
  if (idx == leg.plan.size()) throw Error("no vqe fragment in the plan");
  RunConfig sv = cfg;
  sv.vqe = statevector_copy(cfg.vqe);
  const auto res = solve_leg(sv, leg, 0);
  FragmentQubitProblem out;
  out.mu = res.mu;
  out.active = make_active_space(leg.system.problems[idx].with_mu(res.mu), cfg.active_space);
  const int half = cfg.active_space.n_electrons / 2;
  out.problem = make_vqe_problem(qubit_hamiltonian(out.active.hamiltonian), half, half);
  return out;
}

std::string mitigation_report_csv(const RunConfig& cfg, int n_runs, std::int64_t shots) {
  if (n_runs < 1) throw Error("need at least one run");
  std::string out =
      "ligand,leg,run,theta,statevector,raw,pmsv,pmsv_spam,spam_pmsv,dev_raw,dev_pmsv,"
      "dev_pmsv_spam,dev_spam_pmsv,survival_fraction\n";
  char buf[512];
  for (const auto& lig : cfg.ligands)
    for (const auto& [leg_name, env] : {std::pair{"protein", lig.protein}, std::pair{"solvent", lig.solvent}}) {
      const auto leg = prepare_leg(cfg, lig, env);
      const auto fq = vqe_fragment_problem(cfg, leg);
      const AnsatzBuilder ansatz = [ref = fq.reference](double t) {
        return build_yxxx_ansatz(t, 4, ref);
      };
      auto sv_cfg = statevector_copy(cfg.vqe);
      const double theta = vqe_minimize(fq.problem, ansatz, sv_cfg).theta_star;
      const auto stream = derive_seed(cfg.seed, {leg_stream(lig.id, leg_name)});
      const auto spam = spam_calibrate(cfg.vqe.noise, 4, cfg.vqe.spam_shots_per_state,
                                       derive_seed(stream, {0}));
      for (int r = 0; r < n_runs; ++r) {
        const auto m = compare_mitigation(fq.problem, ansatz(theta), cfg.vqe.noise, shots,
                                          derive_seed(stream, {1, static_cast<std::uint64_t>(r)}),
                                          spam);
        std::snprintf(buf, sizeof buf,
                      "%s,%s,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      lig.id.c_str(), leg_name, r, theta, m.statevector, m.raw, m.pmsv,
                      m.pmsv_spam, m.spam_pmsv, m.raw - m.statevector, m.pmsv - m.statevector,
                      m.pmsv_spam - m.statevector, m.spam_pmsv - m.statevector,
                      m.survival_fraction);
        out += buf;
      }
    }
  return out;
}

bool OracleCheck::pass() const { return std::abs(value - reference) <= tolerance; }

namespace {

Molecule hydrogen_chain(int n, double spacing_angstrom) {
  std::ostringstream xyz;
  for (int i = 0; i < n; ++i) xyz << "H 0 0 " << spacing_angstrom * i << "\n";
  return load_geometry(xyz.str(), 0);
}

}  // namespace

std::vector<OracleCheck> run_oracle_checks() {
  std::vector<OracleCheck> checks;
  for (int n : {2, 4, 6}) {
    const auto mol = hydrogen_chain(n, n == 2 ? 0.74 : 0.9);
    const auto basis = build_basis(mol, "sto-3g");
    const auto ints = compute_integrals(mol, basis);
    const auto scf = run_rhf(ints, mol.n_electrons);
    const auto x = lowdin_transform(ints.overlap);
    const auto lo = to_lowdin(ints, x);
    const SpatialHamiltonian ham{lo.e_nuc, lo.h, lo.eri};
    const auto fci = solve_fci(ham, n / 2, n / 2);
    const std::string tag = "H" + std::to_string(n);

    std::vector<std::size_t> all(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    for (auto kind : {SolverKind::MeanField, SolverKind::ExactDiagonalization}) {
      const auto plan = define_fragments(mol, basis, {all}, {kind});
      const auto sys = prepare_dmet(ints, scf, plan, mol.n_electrons);
      const auto res = run_dmet(sys, {classical_solver(kind, std::nullopt)});
      if (kind == SolverKind::MeanField)
        checks.push_back({tag + " one-fragment DMET(hf) vs RHF", res.e_total, scf.e_total, 1e-8});
      else
        checks.push_back({tag + " one-fragment DMET(fci) vs FCI", res.e_total, fci.energy, 1e-8});
    }
    if (n >= 4) {
      std::vector<std::vector<std::size_t>> pairs;
      for (int i = 0; i < n; i += 2)
        pairs.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(i + 1)});
      const auto plan = define_fragments(mol, basis, pairs,
                                         std::vector<SolverKind>(pairs.size(), SolverKind::ExactDiagonalization));
      const auto sys = prepare_dmet(ints, scf, plan, mol.n_electrons);
      std::vector<FragmentSolver> solvers(pairs.size(), classical_solver(SolverKind::ExactDiagonalization, std::nullopt));
      const auto res = run_dmet(sys, solvers);
      double count = 0.0;
      for (const auto& f : res.fragments) count += f.n_elec_on_fragment;
      checks.push_back({tag + " pair-fragment DMET electron count at mu*", count,
                        static_cast<double>(mol.n_electrons), 1e-6});
      if (n == 4)
        checks.push_back({tag + " pair-fragment DMET(fci) vs FCI", res.e_total, fci.energy, 1e-8});
    }
    if (n == 2) {
      const SpatialHamiltonian mo{ints.e_nuc, scf.mo_coeffs.transpose() * ints.h_core * scf.mo_coeffs,
                                  transform(ints.eri, scf.mo_coeffs)};
      const auto q = qubit_hamiltonian(mo);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q.to_matrix());
      checks.push_back({tag + " qubit Hamiltonian ground state vs FCI", es.eigenvalues()(0),
                        fci.energy, 1e-8});
      const auto vp = make_vqe_problem(q, 1, 1);
      const auto est = vqe_minimize(vp, [](double t) { return build_yxxx_ansatz(t); }, VqeConfig{});
      checks.push_back({tag + " statevector VQE vs FCI", est.mean, fci.energy, 1e-8});
    }
  }
  return checks;
}

namespace {

using CsvTable = std::vector<std::map<std::string, std::string>>;

CsvTable parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  CsvTable rows;
  std::size_t line_no = 0;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    if (!l.empty() && l.back() == ',') out.emplace_back();
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (header.empty()) {
      header = cells;
      continue;
    }
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns", line_no);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

double to_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw Error("bad number '" + s + "' in " + what);
  }
}

}  // namespace

FixtureAnalysis analyze_fixture(const std::string& binding_csv_text, const std::string& potency_csv,
                                const std::string& column, const std::string& delta_column,
                                const std::vector<std::string>& weak) {
  std::map<std::string, double> potency;
  for (const auto& row : parse_csv(potency_csv)) {
    if (!row.count("ligand") || !row.count("pic50"))
      throw Error("potency table needs ligand and pic50 columns");
    potency[row.at("ligand")] = to_number(row.at("pic50"), "pic50");
  }
  std::vector<std::string> ids;
  std::vector<double> e, pot;
  for (const auto& row : parse_csv(binding_csv_text)) {
    if (!row.count("ligand") || !row.count(column))
      throw Error("binding table lacks column '" + column + "'");
    const auto& id = row.at("ligand");
    if (row.at(column).empty()) continue;
    double v = to_number(row.at(column), column);
    if (!delta_column.empty()) {
      if (!row.count(delta_column)) throw Error("binding table lacks column '" + delta_column + "'");
      if (row.at(delta_column).empty()) continue;
      v += to_number(row.at(delta_column), delta_column);
    }
    if (!potency.count(id)) throw Error("no potency for ligand '" + id + "'");
    ids.push_back(id);
    e.push_back(v);
    pot.push_back(potency.at(id));
  }
  FixtureAnalysis out;
  out.correlation = rank_and_correlate(ids, e, pot);
  if (!weak.empty()) {
    const std::set<std::string> ws(weak.begin(), weak.end());
    std::vector<double> w, s;
    for (std::size_t i = 0; i < ids.size(); ++i) (ws.count(ids[i]) ? w : s).push_back(e[i]);
    out.discrimination = discrimination_stats(w, s);
  }
  return out;
}

}  // namespace qembed
