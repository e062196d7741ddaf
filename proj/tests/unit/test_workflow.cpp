#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "qembed/analysis.hpp"
#include "qembed/config.hpp"
#include "qembed/error.hpp"
#include "qembed/report.hpp"
#include "qembed/workflow.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace qembed;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qembed-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Two H2 variants in one directory, both legs configurable.
RunConfig toy_config(const fs::path& dir, const std::string& protein, const std::string& solvent,
                     const std::string& solver = "fci") {
  write(dir / "h2a.xyz", "H 0 0 0\nH 0 0 0.74\n");
  write(dir / "h2b.xyz", "H 0 0 0\nH 0 0 0.80\n");
  std::ostringstream js;
  js << R"({"fragment_solvers": [")" << solver << R"(", "hf"], "protein": ")" << protein
     << R"(", "solvent": ")" << solvent << R"(", "seed": 5, "ligands": [
        {"id": "a", "xyz": "h2a.xyz", "fragments": [[0], [1]]},
        {"id": "b", "xyz": "h2b.xyz", "fragments": [[0], [1]]}]})";
  return parse_run_config(js.str(), dir);
}

std::vector<LigandLegs> random_legs(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-5.0, -1.0);
  std::vector<LigandLegs> legs;
  for (int i = 0; i < n; ++i) legs.push_back({"l" + std::to_string(i), u(rng), u(rng), "site.pc"});
  return legs;
}

}  // namespace

TEST_CASE("binding energy", "[workflow]") {
  CHECK(binding_energy(-3.2, -3.2) == 0.0);
  CHECK(binding_energy(-3.3, -3.2) < 0.0);
  CHECK(binding_energy(-1.0, "m", -2.0, "m") == 1.0);
  CHECK_THROWS_AS(binding_energy(-1.0, "m", -2.0, "n"), Error);

  SECTION("swapping legs negates exactly") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-200.0, -1.0);
    for (int k = 0; k < 100; ++k) {
      const double a = u(rng), b = u(rng);
      CHECK(binding_energy(a, b) == -binding_energy(b, a));
    }
  }

  SECTION("fixture value of ligand 89") {
    const auto rows = slurp(test_support::data_path("fixtures/binding_energies.csv"));
    CHECK(rows.find("\n89,-0.07883,") != std::string::npos);
    const double e_solvent = -1234.5;
    CHECK(binding_energy(e_solvent - 0.07883, e_solvent) == Approx(-0.07883).margin(1e-9));
  }
}

TEST_CASE("ranking metric", "[workflow]") {
  const auto legs = random_legs(6, 3);
  const auto m = ranking_metric(legs, "l0");
  REQUIRE(m.rows() == 6);
  Eigen::VectorXd e(6);
  for (int i = 0; i < 6; ++i) e(i) = binding_energy(*legs[static_cast<std::size_t>(i)].e_protein,
                                                    *legs[static_cast<std::size_t>(i)].e_solvent);
  const Eigen::MatrixXd structure =
      e * Eigen::RowVectorXd::Ones(6) - Eigen::VectorXd::Ones(6) * e.transpose();
  CHECK((m - structure).cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i < 6; ++i) {
    CHECK(m(i, i) == 0.0);
    for (int j = 0; j < 6; ++j) {
      CHECK(m(i, j) == -m(j, i));
      for (int k = 0; k < 6; ++k) CHECK(std::abs(m(i, j) + m(j, k) - m(i, k)) < 1e-12);
    }
  }

  SECTION("errors") {
    auto missing = legs;
    missing[2].e_solvent.reset();
    CHECK_THROWS_WITH(ranking_metric(missing, "l0"), Catch::Matchers::ContainsSubstring("l2"));
    auto other_env = legs;
    other_env[3].protein_environment = "elsewhere.pc";
    CHECK_THROWS_AS(ranking_metric(other_env, "l0"), Error);
    CHECK_THROWS_AS(ranking_metric(legs, "nope"), Error);
  }
}

TEST_CASE("correlation and discrimination", "[workflow]") {
  SECTION("perfect line") {
    const auto c = rank_and_correlate({"a", "b", "c", "d"}, {-0.1, -0.2, -0.3, -0.4}, {5, 6, 7, 8});
    CHECK(c.r2 == Approx(1.0));
    CHECK(c.slope == Approx(-0.1));
    CHECK(c.intercept == Approx(0.4));
    CHECK(c.ordering == std::vector<std::string>{"d", "c", "b", "a"});
    CHECK(c.n == 4);
  }

  SECTION("degenerate input") {
    CHECK_THROWS_AS(rank_and_correlate({"a", "b", "c"}, {1, 2, 3}, {5, 5, 5}), Error);
    CHECK_THROWS_AS(rank_and_correlate({"a", "b"}, {1, 2}, {5, 6}), Error);
  }

  SECTION("group statistics") {
    const auto same = discrimination_stats({-0.1, -0.2}, {-0.1, -0.2});
    CHECK(same.shift == 0.0);
    const auto single = discrimination_stats({-0.05}, {-0.08});
    CHECK(single.mean_weak == -0.05);
    CHECK(single.mean_strong == -0.08);
    CHECK(single.std_weak == 0.0);
    CHECK(single.shift == Approx(0.03));
    CHECK(single.overlap == 0.0);
    CHECK_THROWS_AS(discrimination_stats({}, {-0.1}), Error);
  }
}

TEST_CASE("fixture analysis", "[workflow]") {
  const auto binding = slurp(test_support::data_path("fixtures/binding_energies.csv"));
  const auto potency = slurp(test_support::data_path("fixtures/pic50.csv"));

  SECTION("statevector energies") {
    const auto a = analyze_fixture(binding, potency, "e_bind_statevector", "", {"67", "109"});
    CHECK(a.correlation.n == 12);
    CHECK(a.correlation.r2 == Approx(0.556).margin(0.001));
    CHECK(std::abs(a.correlation.r2 - 0.55) <= 0.03);
    REQUIRE(a.discrimination);
    CHECK(a.discrimination->shift == Approx(0.019186).margin(1e-6));
    CHECK(a.correlation.ordering.front() == "14d");
    CHECK(a.correlation.ordering.back() == "109");
  }

  SECTION("transmon corrections") {
    const auto a = analyze_fixture(binding, potency, "e_bind_statevector", "delta_transmon", {});
    CHECK(a.correlation.r2 == Approx(0.771).margin(0.001));
    CHECK(!a.discrimination);
  }

  SECTION("trapped-ion subset") {
    const auto a = analyze_fixture(binding, potency, "e_bind_statevector", "delta_trapped_ion", {});
    CHECK(a.correlation.n == 6);
    CHECK(a.correlation.r2 == Approx(0.5605).margin(0.001));
  }

  SECTION("bad columns") {
    CHECK_THROWS_AS(analyze_fixture(binding, potency, "nope", "", {}), Error);
  }
}

TEST_CASE("run configuration", "[workflow]") {
  const auto cfg = load_run_config(test_support::data_path("mini_oxazine/statevector.json"));
  CHECK(cfg.ligands.size() == 4);
  CHECK(cfg.solvers == std::vector<SolverKind>{SolverKind::Vqe, SolverKind::MeanField,
                                               SolverKind::MeanField});
  CHECK(cfg.reference_ligand == "amd-h");
  CHECK(cfg.ligands[0].potency == 6.0);
  CHECK(cfg.ligands[0].charge == 1);
  CHECK(fs::exists(cfg.resolve(cfg.ligands[0].xyz)));
  CHECK(cfg.method_fingerprint() == load_run_config(test_support::data_path("mini_oxazine/statevector.json")).method_fingerprint());
  CHECK(cfg.method_fingerprint() != load_run_config(test_support::data_path("mini_oxazine/noisy.json")).method_fingerprint());

  const std::string base = R"({"fragment_solvers": ["fci"], "ligands": [{"id": "x", "xyz": "x.xyz", "fragments": [[0]]}])";
  CHECK_NOTHROW(parse_run_config(base + "}"));
  CHECK_THROWS_WITH(parse_run_config(base + R"(, "colour": 1})"),
                    Catch::Matchers::ContainsSubstring("colour"));
  CHECK_THROWS_AS(parse_run_config(base + R"(, "reference_ligand": "y"})"), Error);
  CHECK_THROWS_AS(parse_run_config(base + R"(, "weak_ligands": ["y"]})"), Error);
  CHECK_THROWS_AS(parse_run_config(base + R"(, "vqe": {"final_shots": 7, "backend": "shots"}})"), Error);
  CHECK_THROWS_AS(parse_run_config(base + R"(, "vqe": {"backend": "qpu"}})"), Error);
  CHECK_THROWS_AS(parse_run_config(R"({"fragment_solvers": ["fci", "hf"], "ligands": [{"id": "x", "xyz": "x.xyz", "fragments": [[0]]}]})"), Error);
  CHECK_THROWS_AS(parse_run_config("{not json"), ParseError);
}

TEST_CASE("leg streams", "[workflow]") {
  CHECK(leg_stream("amd-h", "protein") == leg_stream("amd-h", "protein"));
  CHECK(leg_stream("amd-h", "protein") != leg_stream("amd-h", "solvent"));
  CHECK(leg_stream("amd-h", "protein") != leg_stream("amd-me", "protein"));
}

TEST_CASE("toy workflows", "[workflow]") {
  SECTION("vacuum on both legs gives zero binding energy") {
    const auto dir = scratch_dir("vac");
    const auto cfg = toy_config(dir, "vacuum", "vacuum");
    const auto report = run_workflow(cfg);
    REQUIRE(report.all_ok());
    for (const auto& l : report.ligands) {
      REQUIRE(l.e_bind);
      CHECK(*l.e_bind == 0.0);
      CHECK(l.protein->e_total == l.solvent->e_total);
    }
  }

  SECTION("empty charge file on both legs gives zero binding energy") {
    const auto dir = scratch_dir("empty");
    write(dir / "none.pc", "# no charges\n");
    const auto report = run_workflow(toy_config(dir, "none.pc", "none.pc"));
    REQUIRE(report.all_ok());
    for (const auto& l : report.ligands) CHECK(*l.e_bind == 0.0);
  }

  SECTION("charges move the energy and a failing ligand does not stop the rest") {
    const auto dir = scratch_dir("charges");
    write(dir / "shell.pc", "0 0 -2.5 -0.5\n0 0 3.3 -0.5\n");
    auto cfg = toy_config(dir, "shell.pc", "vacuum");
    cfg.ligands[1].xyz = "missing.xyz";
    const auto report = run_workflow(cfg);
    CHECK_FALSE(report.all_ok());
    REQUIRE(report.ligands.size() == 2);
    CHECK(report.ligands[0].ok);
    CHECK(*report.ligands[0].e_bind != 0.0);
    CHECK(report.ligands[0].protein->n_charges == 2);
    CHECK_FALSE(report.ligands[1].ok);
    CHECK(report.ligands[1].error.find("missing.xyz") != std::string::npos);
  }

  SECTION("whole-molecule fragment reproduces the exact energy") {
    const auto dir = scratch_dir("exact");
    auto cfg = toy_config(dir, "vacuum", "vacuum", "vqe");
    const auto leg = run_leg(cfg, cfg.ligands[0], "vacuum", 1);
    CHECK(leg.e_corr <= 0.0);
    CHECK(leg.e_total < leg.e_hf);
    CHECK(leg.n_electrons == 2);
  }
}

TEST_CASE("mini-oxazine environment trend", "[workflow]") {
  const auto cfg = load_run_config(test_support::data_path("mini_oxazine/statevector.json"));
  const auto& lig = cfg.ligands[0];
  const auto protein = run_leg(cfg, lig, lig.protein, 1);
  const auto solvent = run_leg(cfg, lig, lig.solvent, 2);
  CHECK(protein.e_corr <= 0.0);
  CHECK(solvent.e_corr <= 0.0);
  CHECK(std::abs(protein.e_corr) > std::abs(solvent.e_corr));
  CHECK(protein.fragments.size() == 3);
  CHECK(protein.fragments[0].solver == "vqe");
  CHECK(protein.fragments[0].n_elec_emb > 0);
}

TEST_CASE("reports", "[workflow]") {
  const auto dir = scratch_dir("report");
  const auto cfg = toy_config(dir, "vacuum", "vacuum");
  auto report = run_workflow(cfg);
  report.ligands[0].potency = 6.5;

  SECTION("JSON round-trips") {
    const auto text = report_to_json(report);
    const auto back = report_from_json(text);
    CHECK(report_to_json(back) == text);
    CHECK(back.ligands.size() == report.ligands.size());
    CHECK(back.ligands[0].protein->e_total == report.ligands[0].protein->e_total);
    CHECK(back.seed == report.seed);
    CHECK_THROWS_AS(report_from_json("{}"), Error);
  }

  SECTION("same config, same bytes") {
    CHECK(report_to_json(run_workflow(cfg)) == report_to_json(run_workflow(cfg)));
  }

  SECTION("files on disk") {
    write_report(report, dir / "out");
    for (const char* name : {"report.json", "binding.csv", "fragments.csv", "scatter.csv", "summary.txt"})
      CHECK(fs::exists(dir / "out" / name));
    CHECK(slurp(dir / "out" / "binding.csv").rfind("ligand,", 0) == 0);
  }

  SECTION("aggregate fills from ligand entries") {
    BindingReport r;
    const double e[] = {-0.10, -0.05, -0.02};
    const double pot[] = {7.0, 6.0, 5.0};
    for (int i = 0; i < 3; ++i) {
      LigandReport l;
      l.id = "l" + std::to_string(i);
      l.ok = true;
      l.potency = pot[i];
      LegReport p, s;
      p.environment = "site.pc";
      p.e_total = -1.0 + e[i];
      s.e_total = -1.0;
      l.protein = p;
      l.solvent = s;
      l.e_bind = e[i];
      r.ligands.push_back(l);
    }
    fill_aggregate(r, std::string("l0"), {"l2"});
    REQUIRE(r.aggregate.correlation);
    CHECK(r.aggregate.correlation->r2 > 0.9);
    CHECK(r.aggregate.ranking_matrix.size() == 3);
    CHECK(r.aggregate.ranking_matrix[0][1] == Approx(-0.05));
    REQUIRE(r.aggregate.discrimination);
    CHECK(r.aggregate.discrimination->mean_weak == Approx(-0.02));
  }
}

TEST_CASE("internal oracle checks", "[workflow]") {
  const auto checks = run_oracle_checks();
  CHECK(checks.size() >= 10);
  for (const auto& c : checks) {
    INFO(c.name << ": " << c.value << " vs " << c.reference);
    CHECK(c.pass());
  }
}
