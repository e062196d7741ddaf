#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qembed/analysis.hpp"
#include "qembed/basis.hpp"
#include "qembed/circuit.hpp"
#include "qembed/config.hpp"
#include "qembed/error.hpp"
#include "qembed/fci.hpp"
#include "qembed/integrals.hpp"
#include "qembed/qubitmap.hpp"
#include "qembed/report.hpp"
#include "qembed/scf.hpp"
#include "qembed/vqe.hpp"
#include "qembed/workflow.hpp"

namespace py = pybind11;
using namespace qembed;

namespace {

struct Prepared {
  Molecule mol;
  IntegralSet ints;
  ScfSolution scf;
};

Prepared prepare(const std::string& xyz, int charge, const std::string& charges,
                 const std::string& basis_name) {
  Prepared p{load_geometry(xyz, charge), {}, {}};
  const auto basis = build_basis(p.mol, basis_name);
  p.ints = compute_integrals(p.mol, basis, load_point_charges(charges));
  p.scf = run_rhf(p.ints, p.mol.n_electrons);
  return p;
}

SpatialHamiltonian mo_hamiltonian(const Prepared& p) {
  const auto& c = p.scf.mo_coeffs;
  return {p.ints.e_nuc, c.transpose() * p.ints.h_core * c, transform(p.ints.eri, c)};
}

}  // namespace

PYBIND11_MODULE(_qembed, m) {
  m.doc() = "Quantum-embedding binding-energy pipeline (DMET + VQE).";

  py::register_exception<Error>(m, "QembedError", PyExc_RuntimeError);

  m.def(
      "rhf",
      [](const std::string& xyz, int charge, const std::string& charges, const std::string& basis) {
        const auto p = prepare(xyz, charge, charges, basis);
        py::dict out;
        out["energy"] = p.scf.e_total;
        out["e_nuc"] = p.scf.e_nuc;
        out["mo_energies"] = p.scf.mo_energies;
        out["density"] = p.scf.density;
        out["iterations"] = p.scf.n_iterations;
        return out;
      },
      py::arg("xyz"), py::arg("charge") = 0, py::arg("point_charges") = "",
      py::arg("basis") = "sto-3g", "Restricted Hartree-Fock on XYZ text (Angstrom).");

  m.def(
      "fci_energy",
      [](const std::string& xyz, int charge, const std::string& charges, const std::string& basis) {
        const auto p = prepare(xyz, charge, charges, basis);
        const int half = p.mol.n_electrons / 2;
        return solve_fci(mo_hamiltonian(p), half, half, false).energy;
      },
      py::arg("xyz"), py::arg("charge") = 0, py::arg("point_charges") = "",
      py::arg("basis") = "sto-3g");

  m.def(
      "qubit_hamiltonian",
      [](const std::string& xyz, int charge, const std::string& basis) {
        return qubit_hamiltonian(mo_hamiltonian(prepare(xyz, charge, "", basis))).to_text();
      },
      py::arg("xyz"), py::arg("charge") = 0, py::arg("basis") = "sto-3g",
      "Jordan-Wigner Hamiltonian in canonical orbitals, one '+c P' term per line.");

  m.def(
      "yxxx_statevector",
      [](double theta) { return Eigen::VectorXcd(simulate_statevector(build_yxxx_ansatz(theta))); },
      py::arg("theta"), "Amplitudes of the 4-qubit YXXX ansatz; index bit q is qubit q.");

  m.def(
      "vqe_energy",
      [](const std::string& xyz, int charge, const std::string& backend, std::int64_t final_shots,
         std::uint64_t seed) {
        const auto p = prepare(xyz, charge, "", "sto-3g");
        if (p.mol.n_electrons != 2 || p.scf.mo_coeffs.cols() != 2)
          throw Error("vqe_energy needs two electrons in two spatial orbitals");
        VqeConfig cfg;
        cfg.backend = backend_from_string(backend);
        cfg.final_shots = final_shots;
        cfg.seed = seed;
        cfg.theta_source = ThetaSource::Statevector;
        const auto prob = make_vqe_problem(qubit_hamiltonian(mo_hamiltonian(p)), 1, 1);
        const auto est = vqe_minimize(prob, [](double t) { return build_yxxx_ansatz(t); }, cfg);
        py::dict out;
        out["energy"] = est.mean;
        out["std"] = est.std;
        out["theta"] = est.theta_star;
        out["survival_fraction"] = est.survival_fraction;
        out["e_hf"] = p.scf.e_total;
        return out;
      },
      py::arg("xyz"), py::arg("charge") = 0, py::arg("backend") = "statevector",
      py::arg("final_shots") = 60000, py::arg("seed") = 0);

  m.def("binding_energy", py::overload_cast<double, double>(&binding_energy), py::arg("e_in_protein"),
        py::arg("e_in_solvent"));

  m.def(
      "rank_and_correlate",
      [](const std::vector<std::string>& ids, const std::vector<double>& e,
         const std::vector<double>& potency) {
        const auto c = rank_and_correlate(ids, e, potency);
        py::dict out;
        out["r2"] = c.r2;
        out["slope"] = c.slope;
        out["intercept"] = c.intercept;
        out["ordering"] = c.ordering;
        return out;
      },
      py::arg("ids"), py::arg("e_bind"), py::arg("potency"));

  m.def(
      "discrimination_stats",
      [](const std::vector<double>& weak, const std::vector<double>& strong) {
        const auto d = discrimination_stats(weak, strong);
        py::dict out;
        out["mean_weak"] = d.mean_weak;
        out["mean_strong"] = d.mean_strong;
        out["std_weak"] = d.std_weak;
        out["std_strong"] = d.std_strong;
        out["shift"] = d.shift;
        out["overlap"] = d.overlap;
        return out;
      },
      py::arg("weak"), py::arg("strong"));

  m.def(
      "analyze_fixture",
      [](const std::string& binding_csv, const std::string& potency_csv, const std::string& column,
         const std::string& delta, const std::vector<std::string>& weak) {
        const auto a = analyze_fixture(binding_csv, potency_csv, column, delta, weak);
        py::dict out;
        out["n"] = a.correlation.n;
        out["r2"] = a.correlation.r2;
        out["ordering"] = a.correlation.ordering;
        if (a.discrimination) out["shift"] = a.discrimination->shift;
        return out;
      },
      py::arg("binding_csv"), py::arg("potency_csv"), py::arg("column") = "e_bind_statevector",
      py::arg("delta_column") = "", py::arg("weak") = std::vector<std::string>{});

  m.def(
      "run_config",
      [](const std::filesystem::path& path) {
        const auto cfg = load_run_config(path);
        BindingReport report;
        {
          py::gil_scoped_release release;
          report = run_workflow(cfg);
        }
        return report_to_json(report);
      },
      py::arg("path"), "Runs a config file and returns the report as JSON text.");

  m.def("oracle_checks", [] {
    py::list out;
    for (const auto& c : run_oracle_checks()) {
      py::dict d;
      d["name"] = c.name;
      d["value"] = c.value;
      d["reference"] = c.reference;
      d["tolerance"] = c.tolerance;
      d["pass"] = c.pass();
      out.append(d);
    }
    return out;
  });

#ifdef QEMBED_VERSION
  m.attr("__version__") = QEMBED_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
