#include "qembed/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "qembed/error.hpp"
#include "qembed/log.hpp"

namespace qembed {

using nlohmann::json;

bool BindingReport::all_ok() const {
  for (const auto& l : ligands)
    if (!l.ok) return false;
  return true;
}

// JSON mapping. nlohmann prints doubles in shortest round-trip form.
void to_json(json& j, const FragmentReport& f) {
  j = json{{"solver", f.solver},
           {"n_orbitals", f.n_orbitals},
           {"n_bath", f.n_bath},
           {"n_elec_emb", f.n_elec_emb},
           {"e_frag", f.e_frag},
           {"n_elec_on_fragment", f.n_elec_on_fragment},
           {"e_solver", f.e_solver},
           {"e_reference", f.e_reference},
           {"e_corr", f.e_corr},
           {"std_error", f.std_error},
           {"survival_fraction", f.survival_fraction},
           {"positive_e_corr", f.positive_e_corr}};
}

void from_json(const json& j, FragmentReport& f) {
  j.at("solver").get_to(f.solver);
  j.at("n_orbitals").get_to(f.n_orbitals);
  j.at("n_bath").get_to(f.n_bath);
  j.at("n_elec_emb").get_to(f.n_elec_emb);
  j.at("e_frag").get_to(f.e_frag);
  j.at("n_elec_on_fragment").get_to(f.n_elec_on_fragment);
  j.at("e_solver").get_to(f.e_solver);
  j.at("e_reference").get_to(f.e_reference);
  j.at("e_corr").get_to(f.e_corr);
  j.at("std_error").get_to(f.std_error);
  j.at("survival_fraction").get_to(f.survival_fraction);
  j.at("positive_e_corr").get_to(f.positive_e_corr);
}

void to_json(json& j, const LegReport& l) {
  j = json{{"environment", l.environment}, {"n_charges", l.n_charges}, {"method", l.method},
           {"e_total", l.e_total},         {"e_hf", l.e_hf},           {"e_nuc", l.e_nuc},
           {"mu", l.mu},                   {"n_electrons", l.n_electrons},
           {"e_corr", l.e_corr},           {"std_error", l.std_error},
           {"fragments", l.fragments},     {"mu_trace", l.mu_trace}};
}

void from_json(const json& j, LegReport& l) {
  j.at("environment").get_to(l.environment);
  j.at("n_charges").get_to(l.n_charges);
  j.at("method").get_to(l.method);
  j.at("e_total").get_to(l.e_total);
  j.at("e_hf").get_to(l.e_hf);
  j.at("e_nuc").get_to(l.e_nuc);
  j.at("mu").get_to(l.mu);
  j.at("n_electrons").get_to(l.n_electrons);
  j.at("e_corr").get_to(l.e_corr);
  j.at("std_error").get_to(l.std_error);
  j.at("fragments").get_to(l.fragments);
  j.at("mu_trace").get_to(l.mu_trace);
}

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string report_to_json(const BindingReport& r) {
  json ligands = json::array();
  for (const auto& l : r.ligands)
    ligands.push_back({{"id", l.id},
                       {"ok", l.ok},
                       {"error", l.error},
                       {"potency", opt(l.potency)},
                       {"protein", opt(l.protein)},
                       {"solvent", opt(l.solvent)},
                       {"e_bind", opt(l.e_bind)}});
  const auto& a = r.aggregate;
  json agg = {{"reference", opt(a.reference)},
              {"matrix_ligands", a.matrix_ligands},
              {"ranking_matrix", a.ranking_matrix},
              {"weak", a.weak}};
  if (a.correlation)
    agg["correlation"] = {{"ordering", a.correlation->ordering}, {"r2", a.correlation->r2},
                          {"slope", a.correlation->slope},       {"intercept", a.correlation->intercept},
                          {"n", a.correlation->n}};
  else
    agg["correlation"] = nullptr;
  if (a.discrimination) {
    const auto& d = *a.discrimination;
    agg["discrimination"] = {{"mean_weak", d.mean_weak},     {"std_weak", d.std_weak},
                             {"mean_strong", d.mean_strong}, {"std_strong", d.std_strong},
                             {"shift", d.shift},             {"overlap", d.overlap}};
  } else {
    agg["discrimination"] = nullptr;
  }
  json j = {{"format", "qembed-binding-report"},
            {"version", 1},
            {"method", r.method},
            {"seed", r.seed},
            {"notes", r.notes},
            {"ligands", ligands},
            {"aggregate", agg}};
  return j.dump(2) + "\n";
}

BindingReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report is not valid JSON: ") + e.what(), 0);
  }
  try {
    if (j.value("format", "") != "qembed-binding-report")
      throw Error("not a qembed binding report");
    BindingReport r;
    j.at("method").get_to(r.method);
    j.at("seed").get_to(r.seed);
    j.at("notes").get_to(r.notes);
    for (const auto& lj : j.at("ligands")) {
      LigandReport l;
      lj.at("id").get_to(l.id);
      lj.at("ok").get_to(l.ok);
      lj.at("error").get_to(l.error);
      l.potency = get_opt<double>(lj, "potency");
      l.protein = get_opt<LegReport>(lj, "protein");
      l.solvent = get_opt<LegReport>(lj, "solvent");
      l.e_bind = get_opt<double>(lj, "e_bind");
      r.ligands.push_back(std::move(l));
    }
    const auto& aj = j.at("aggregate");
    auto& a = r.aggregate;
    a.reference = get_opt<std::string>(aj, "reference");
    aj.at("matrix_ligands").get_to(a.matrix_ligands);
    aj.at("ranking_matrix").get_to(a.ranking_matrix);
    aj.at("weak").get_to(a.weak);
    if (!aj.at("correlation").is_null()) {
      const auto& c = aj.at("correlation");
      Correlation corr;
      c.at("ordering").get_to(corr.ordering);
      c.at("r2").get_to(corr.r2);
      c.at("slope").get_to(corr.slope);
      c.at("intercept").get_to(corr.intercept);
      c.at("n").get_to(corr.n);
      a.correlation = corr;
    }
    if (!aj.at("discrimination").is_null()) {
      const auto& d = aj.at("discrimination");
      DiscriminationStats s;
      d.at("mean_weak").get_to(s.mean_weak);
      d.at("std_weak").get_to(s.std_weak);
      d.at("mean_strong").get_to(s.mean_strong);
      d.at("std_strong").get_to(s.std_strong);
      d.at("shift").get_to(s.shift);
      d.at("overlap").get_to(s.overlap);
      a.discrimination = s;
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed report: ") + e.what());
  }
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string fixed(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string binding_csv(const BindingReport& r) {
  std::string out =
      "ligand,status,e_protein,e_solvent,e_bind,potency,e_corr_protein,e_corr_solvent,"
      "std_protein,std_solvent\n";
  for (const auto& l : r.ligands) {
    out += l.id + "," + (l.ok ? "ok" : "failed") + ",";
    out += (l.protein ? num(l.protein->e_total) : "") + ",";
    out += (l.solvent ? num(l.solvent->e_total) : "") + ",";
    out += num(l.e_bind) + "," + num(l.potency) + ",";
    out += (l.protein ? num(l.protein->e_corr) : "") + ",";
    out += (l.solvent ? num(l.solvent->e_corr) : "") + ",";
    out += (l.protein ? num(l.protein->std_error) : "") + ",";
    out += (l.solvent ? num(l.solvent->std_error) : "") + "\n";
  }
  return out;
}

std::string fragments_csv(const BindingReport& r) {
  std::string out =
      "ligand,leg,fragment,solver,n_orbitals,n_bath,n_elec_emb,e_frag,n_elec_on_fragment,"
      "e_corr,std_error,survival_fraction,positive_e_corr\n";
  for (const auto& l : r.ligands)
    for (const auto* leg : {&l.protein, &l.solvent}) {
      if (!*leg) continue;
      const char* name = leg == &l.protein ? "protein" : "solvent";
      for (std::size_t i = 0; i < (*leg)->fragments.size(); ++i) {
        const auto& f = (*leg)->fragments[i];
        out += l.id + "," + name + "," + std::to_string(i) + "," + f.solver + "," +
               std::to_string(f.n_orbitals) + "," + std::to_string(f.n_bath) + "," +
               std::to_string(f.n_elec_emb) + "," + num(f.e_frag) + "," +
               num(f.n_elec_on_fragment) + "," + num(f.e_corr) + "," + num(f.std_error) + "," +
               num(f.survival_fraction) + "," + (f.positive_e_corr ? "1" : "0") + "\n";
      }
    }
  return out;
}

std::string scatter_csv(const BindingReport& r) {
  std::string out = "ligand,potency,e_bind,std\n";
  for (const auto& l : r.ligands) {
    if (!l.ok || !l.potency || !l.e_bind) continue;
    const double sp = l.protein ? l.protein->std_error : 0.0;
    const double ss = l.solvent ? l.solvent->std_error : 0.0;
    out += l.id + "," + num(*l.potency) + "," + num(*l.e_bind) + "," +
           num(std::sqrt(sp * sp + ss * ss)) + "\n";
  }
  return out;
}

std::string summary_text(const BindingReport& r) {
  std::ostringstream out;
  out << "qembed binding-energy report\n";
  out << "method: " << r.method << "\n";
  out << "seed: " << r.seed << "\n";
  for (const auto& n : r.notes) out << "note: " << n << "\n";
  out << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-7s %18s %18s %12s %8s %11s %11s\n", "ligand", "status",
                "E(protein)", "E(solvent)", "E_bind", "potency", "Ecorr(prot)", "Ecorr(solv)");
  out << line;
  for (const auto& l : r.ligands) {
    std::snprintf(line, sizeof line, "%-10s %-7s %18s %18s %12s %8s %11s %11s\n", l.id.c_str(),
                  l.ok ? "ok" : "FAILED",
                  l.protein ? fixed(l.protein->e_total, 8).c_str() : "-",
                  l.solvent ? fixed(l.solvent->e_total, 8).c_str() : "-",
                  l.e_bind ? fixed(*l.e_bind, 6).c_str() : "-",
                  l.potency ? fixed(*l.potency, 2).c_str() : "-",
                  l.protein ? fixed(l.protein->e_corr, 5).c_str() : "-",
                  l.solvent ? fixed(l.solvent->e_corr, 5).c_str() : "-");
    out << line;
    if (!l.ok) out << "    error: " << l.error << "\n";
    for (const auto* leg : {&l.protein, &l.solvent})
      if (*leg)
        for (const auto& f : (*leg)->fragments)
          if (f.positive_e_corr)
            out << "    warning: positive correlation energy in the "
                << (leg == &l.protein ? "protein" : "solvent") << " leg (" << fixed(f.e_corr, 5)
                << ")\n";
  }
  out << "\nenvironments:\n";
  for (const auto& l : r.ligands) {
    if (l.protein)
      out << "  " << l.id << " protein leg: " << l.protein->environment << " ("
          << l.protein->n_charges << " charges)\n";
    if (l.solvent)
      out << "  " << l.id << " solvent leg: " << l.solvent->environment << " ("
          << l.solvent->n_charges << " charges)\n";
  }
  const auto& a = r.aggregate;
  if (a.correlation) {
    out << "\ncorrelation with potency (n = " << a.correlation->n << "): R^2 = "
        << fixed(a.correlation->r2, 4) << ", E_bind = " << fixed(a.correlation->slope, 6)
        << " * potency + " << fixed(a.correlation->intercept, 6) << "\n";
    out << "ranking (strongest first):";
    for (const auto& id : a.correlation->ordering) out << " " << id;
    out << "\n";
  }
  if (a.discrimination) {
    const auto& d = *a.discrimination;
    out << "\nweak vs strong: mean_weak = " << fixed(d.mean_weak) << ", mean_strong = "
        << fixed(d.mean_strong) << ", shift = " << fixed(d.shift) << ", overlap = "
        << fixed(d.overlap, 3) << "\n";
  }
  if (a.reference && !a.ranking_matrix.empty())
    out << "\nranking metric m(r) computed with reference ligand " << *a.reference << "\n";
  return out.str();
}

void write_report(const BindingReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
  };
  write("report.json", report_to_json(report));
  write("binding.csv", binding_csv(report));
  write("fragments.csv", fragments_csv(report));
  write("scatter.csv", scatter_csv(report));
  write("summary.txt", summary_text(report));
}

void fill_aggregate(BindingReport& report, const std::optional<std::string>& reference,
                    const std::vector<std::string>& weak) {
  auto& a = report.aggregate;
  a = {};
  a.reference = reference;
  a.weak = weak;
  std::vector<LigandLegs> legs;
  std::vector<std::string> ids, pot_ids;
  std::vector<double> e, pot_e, pot;
  for (const auto& l : report.ligands) {
    if (!l.ok || !l.e_bind) continue;
    legs.push_back({l.id, l.protein->e_total, l.solvent->e_total, l.protein->environment});
    ids.push_back(l.id);
    e.push_back(*l.e_bind);
    if (l.potency) {
      pot_ids.push_back(l.id);
      pot_e.push_back(*l.e_bind);
      pot.push_back(*l.potency);
    }
  }
  if (reference) {
    try {
      const auto m = ranking_metric(legs, *reference);
      a.matrix_ligands = ids;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        a.ranking_matrix.emplace_back();
        for (Eigen::Index k = 0; k < m.cols(); ++k) a.ranking_matrix.back().push_back(m(i, k));
      }
    } catch (const Error& err) {
      warn(std::string("ranking metric skipped: ") + err.what());
    }
  }
  if (pot.size() >= 3) {
    try {
      a.correlation = rank_and_correlate(pot_ids, pot_e, pot);
    } catch (const Error& err) {
      warn(std::string("correlation skipped: ") + err.what());
    }
  }
  if (!weak.empty()) {
    const std::set<std::string> weak_set(weak.begin(), weak.end());
    std::vector<double> w, s;
    for (std::size_t i = 0; i < ids.size(); ++i) (weak_set.count(ids[i]) ? w : s).push_back(e[i]);
    if (!w.empty() && !s.empty()) a.discrimination = discrimination_stats(w, s);
  }
}

}  // namespace qembed
