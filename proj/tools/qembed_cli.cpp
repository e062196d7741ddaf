#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qembed/config.hpp"
#include "qembed/error.hpp"
#include "qembed/molecule.hpp"
#include "qembed/report.hpp"
#include "qembed/workflow.hpp"

namespace {

void print_correlation(const qembed::Correlation& c) {
  std::printf("n %zu\nr2 %.6f\nslope %.6g\nintercept %.6g\nordering", c.n, c.r2, c.slope,
              c.intercept);
  for (const auto& id : c.ordering) std::printf(" %s", id.c_str());
  std::printf("\n");
}

void print_discrimination(const qembed::DiscriminationStats& d) {
  std::printf("weak_mean %.6f\nweak_std %.6f\nstrong_mean %.6f\nstrong_std %.6f\nshift %.6f\n"
              "overlap %.6f\n",
              d.mean_weak, d.std_weak, d.mean_strong, d.std_strong, d.shift, d.overlap);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qembed: DMET + VQE binding energies"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the pipeline from a config file");
  std::string config_path, out_dir;
  run->add_option("config", config_path, "config JSON")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "output directory (overrides config)");

  auto* analyze = app.add_subcommand("analyze", "statistics from a report or fixture tables");
  std::string report_path, binding_path, potency_path, column = "e_bind_statevector", delta;
  std::vector<std::string> weak;
  analyze->add_option("--report", report_path, "report.json from a run")->check(CLI::ExistingFile);
  analyze->add_option("--binding", binding_path, "binding energy table")->check(CLI::ExistingFile);
  analyze->add_option("--potency", potency_path, "potency table (ligand,pic50)")
      ->check(CLI::ExistingFile);
  analyze->add_option("--column", column, "binding energy column");
  analyze->add_option("--delta", delta, "deviation column added to --column");
  analyze->add_option("--weak", weak, "weak binders")->delimiter(',');

  auto* mitig = app.add_subcommand("mitigation-report", "raw vs mitigated energies as CSV");
  std::string mitig_config, mitig_out;
  int n_runs = 10;
  std::int64_t shots = 60000;
  mitig->add_option("config", mitig_config, "config JSON")->required()->check(CLI::ExistingFile);
  mitig->add_option("--runs", n_runs, "seeded repetitions per leg");
  mitig->add_option("--shots", shots, "shots per measurement group");
  mitig->add_option("-o,--output", mitig_out, "CSV path (default stdout)");

  auto* oracle = app.add_subcommand("oracle", "HF/FCI cross-checks on hydrogen chains");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = qembed::load_run_config(config_path);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      const auto report = qembed::run_workflow(cfg);
      qembed::write_report(report, cfg.output_dir);
      std::cout << qembed::summary_text(report);
      return report.all_ok() ? 0 : 1;
    }
    if (*analyze) {
      if (!report_path.empty()) {
        auto report = qembed::report_from_json(qembed::read_text_file(report_path));
        if (!weak.empty()) qembed::fill_aggregate(report, report.aggregate.reference, weak);
        if (!report.aggregate.correlation) throw qembed::Error("report has no potency correlation");
        print_correlation(*report.aggregate.correlation);
        if (report.aggregate.discrimination) print_discrimination(*report.aggregate.discrimination);
        return 0;
      }
      if (binding_path.empty() || potency_path.empty())
        throw qembed::Error("analyze needs --report or both --binding and --potency");
      const auto fa = qembed::analyze_fixture(qembed::read_text_file(binding_path),
                                              qembed::read_text_file(potency_path), column, delta,
                                              weak);
      print_correlation(fa.correlation);
      if (fa.discrimination) print_discrimination(*fa.discrimination);
      return 0;
    }
    if (*mitig) {
      const auto cfg = qembed::load_run_config(mitig_config);
      const auto csv = qembed::mitigation_report_csv(cfg, n_runs, shots);
      if (mitig_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(mitig_out) << csv;
      }
      return 0;
    }
    if (*oracle) {
      bool ok = true;
      for (const auto& c : qembed::run_oracle_checks()) {
        std::printf("%s %s: %.12f vs %.12f (tol %.1e)\n", c.pass() ? "PASS" : "FAIL",
                    c.name.c_str(), c.value, c.reference, c.tolerance);
        ok = ok && c.pass();
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
