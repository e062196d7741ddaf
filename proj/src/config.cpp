#include "qembed/config.hpp"

#include <json.hpp>
#include <set>
#include <sstream>

#include "qembed/error.hpp"
#include "qembed/molecule.hpp"

namespace qembed {

using nlohmann::json;

std::filesystem::path RunConfig::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

std::string RunConfig::method_fingerprint() const {
  std::ostringstream out;
  out.precision(17);
  out << "basis=" << basis << ";solvers=";
  for (std::size_t i = 0; i < solvers.size(); ++i) out << (i ? "," : "") << to_string(solvers[i]);
  out << ";active=" << active_space.n_electrons << "e" << active_space.n_spin_orbitals << "so";
  out << ";vqe=" << to_string(vqe.backend) << "," << to_string(vqe.optimizer)
      << ",shots=" << vqe.shots_per_iteration << "/" << vqe.final_shots << "/" << vqe.n_blocks
      << ",pmsv=" << vqe.pmsv << ",spam=" << vqe.spam
      << ",order=" << (vqe.order == MitigationOrder::PmsvThenSpam ? "pmsv-spam" : "spam-pmsv")
      << ",theta=" << (vqe.theta_source == ThetaSource::Backend ? "backend" : "statevector");
  if (vqe.backend == Backend::NoisyShots) out << ",noise=" << vqe.noise.fingerprint();
  out << ";mu_tol=" << mu.tolerance;
  return out.str();
}

void RunConfig::validate() const {
  if (ligands.empty()) throw Error("config: no ligands");
  if (solvers.empty()) throw Error("config: no fragment solvers");
  std::set<std::string> ids;
  for (const auto& l : ligands) {
    if (l.id.empty()) throw Error("config: ligand with empty id");
    if (!ids.insert(l.id).second) throw Error("config: duplicate ligand id '" + l.id + "'");
    if (l.fragments.size() != solvers.size())
      throw Error("config: ligand '" + l.id + "' has " + std::to_string(l.fragments.size()) +
                  " fragments but " + std::to_string(solvers.size()) + " solvers are given");
  }
  if (reference_ligand && !ids.count(*reference_ligand))
    throw Error("config: reference ligand '" + *reference_ligand + "' is not a ligand");
  for (const auto& w : weak_ligands)
    if (!ids.count(w)) throw Error("config: weak ligand '" + w + "' is not a ligand");
  vqe.validate();
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(std::string("config: bad value for '") + key + "': " + e.what());
  }
}

VqeConfig parse_vqe(const json& j) {
  VqeConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) throw Error("config: 'vqe' must be an object");
  static const std::set<std::string> known = {
      "backend", "optimizer", "shots_per_iteration", "final_shots", "n_blocks", "pmsv", "spam",
      "mitigation_order", "noise", "theta_source", "theta0", "spam_shots_per_state"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw Error("config: unknown key 'vqe." + it.key() + "'");
  c.backend = backend_from_string(get_or<std::string>(j, "backend", "statevector"));
  c.optimizer = optimizer_from_string(get_or<std::string>(j, "optimizer", "rotosolve"));
  c.shots_per_iteration = get_or<std::int64_t>(j, "shots_per_iteration", c.shots_per_iteration);
  c.final_shots = get_or<std::int64_t>(j, "final_shots", c.final_shots);
  c.n_blocks = get_or<int>(j, "n_blocks", c.n_blocks);
  c.pmsv = get_or<bool>(j, "pmsv", c.pmsv);
  c.spam = get_or<bool>(j, "spam", c.spam);
  c.spam_shots_per_state = get_or<std::int64_t>(j, "spam_shots_per_state", c.spam_shots_per_state);
  c.theta0 = get_or<double>(j, "theta0", c.theta0);
  const auto order = get_or<std::string>(j, "mitigation_order", "pmsv-spam");
  if (order == "pmsv-spam") c.order = MitigationOrder::PmsvThenSpam;
  else if (order == "spam-pmsv") c.order = MitigationOrder::SpamThenPmsv;
  else throw Error("config: mitigation_order must be pmsv-spam or spam-pmsv");
  const auto theta = get_or<std::string>(j, "theta_source", "backend");
  if (theta == "backend") c.theta_source = ThetaSource::Backend;
  else if (theta == "statevector") c.theta_source = ThetaSource::Statevector;
  else throw Error("config: theta_source must be backend or statevector");
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    if (n.is_string()) {
      c.noise = NoiseModel::preset(n.get<std::string>());
    } else if (n.is_object()) {
      c.noise = NoiseModel{};
      c.noise.name = get_or<std::string>(n, "name", "custom");
      c.noise.depol_1q = get_or<double>(n, "depol_1q", 0.0);
      c.noise.depol_2q = get_or<double>(n, "depol_2q", 0.0);
      if (n.contains("readout"))
        for (const auto& r : n.at("readout")) {
          if (!r.is_array() || r.size() != 2)
            throw Error("config: noise.readout entries are [p(1|0), p(0|1)] pairs");
          c.noise.readout.push_back({r[0].get<double>(), r[1].get<double>()});
        }
    } else {
      throw Error("config: 'vqe.noise' must be a preset name or an object");
    }
  }
  return c;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
  }
  if (!j.is_object()) throw Error("config: top level must be an object");
  static const std::set<std::string> known = {
      "ligands", "fragment_solvers", "active_space", "basis", "vqe", "mu_tolerance",
      "reference_ligand", "weak_ligands", "seed", "output_dir", "protein", "solvent"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw Error("config: unknown key '" + it.key() + "'");

  RunConfig cfg;
  cfg.base_dir = base_dir;
  cfg.basis = get_or<std::string>(j, "basis", cfg.basis);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string());
  cfg.mu.tolerance = get_or<double>(j, "mu_tolerance", cfg.mu.tolerance);
  if (j.contains("reference_ligand")) cfg.reference_ligand = j.at("reference_ligand").get<std::string>();
  cfg.weak_ligands = get_or<std::vector<std::string>>(j, "weak_ligands", {});
  for (const auto& s : get_or<std::vector<std::string>>(j, "fragment_solvers", {}))
    cfg.solvers.push_back(solver_kind_from_string(s));
  if (j.contains("active_space")) {
    const auto as = get_or<std::vector<int>>(j, "active_space", {});
    if (as.size() != 2) throw Error("config: active_space is [n_electrons, n_spin_orbitals]");
    cfg.active_space = {as[0], as[1]};
  }
  cfg.vqe = parse_vqe(j.contains("vqe") ? j.at("vqe") : json());
  cfg.vqe.seed = cfg.seed;

  const auto default_protein = get_or<std::string>(j, "protein", kVacuum);
  const auto default_solvent = get_or<std::string>(j, "solvent", kVacuum);
  if (!j.contains("ligands") || !j.at("ligands").is_array())
    throw Error("config: 'ligands' must be a list");
  static const std::set<std::string> ligand_keys = {"id", "xyz", "charge", "fragments",
                                                    "protein", "solvent", "potency"};
  for (const auto& lj : j.at("ligands")) {
    for (auto it = lj.begin(); it != lj.end(); ++it)
      if (!ligand_keys.count(it.key())) throw Error("config: unknown ligand key '" + it.key() + "'");
    LigandEntry l;
    if (!lj.contains("id") || !lj.contains("xyz"))
      throw Error("config: every ligand needs 'id' and 'xyz'");
    l.id = lj.at("id").is_string() ? lj.at("id").get<std::string>() : lj.at("id").dump();
    l.xyz = lj.at("xyz").get<std::string>();
    l.charge = get_or<int>(lj, "charge", 0);
    l.fragments = get_or<std::vector<std::vector<std::size_t>>>(lj, "fragments", {});
    l.protein = get_or<std::string>(lj, "protein", default_protein);
    l.solvent = get_or<std::string>(lj, "solvent", default_solvent);
    if (lj.contains("potency") && !lj.at("potency").is_null()) l.potency = lj.at("potency").get<double>();
    cfg.ligands.push_back(std::move(l));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path.string()), path.parent_path().empty() ? "." : path.parent_path());
}

}  // namespace qembed
