#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qpf/acceptance.hpp"
#include "qpf/dcpf.hpp"
#include "qpf/errors.hpp"
#include "qpf/harness.hpp"
#include "qpf/hhl.hpp"
#include "qpf/hybrid.hpp"
#include "qpf/qpe.hpp"

namespace py = pybind11;

namespace {

qpf::RunMode parse_mode(const std::string& s) {
  if (s == "exact") return qpf::RunMode::exact;
  if (s == "sampled") return qpf::RunMode::sampled;
  throw qpf::validation_error("unknown mode '" + s + "' (expected exact or sampled)");
}

qpf::Engine parse_engine(const std::string& s) {
  if (s == "auto") return qpf::Engine::automatic;
  if (s == "circuit") return qpf::Engine::circuit;
  if (s == "fastpath") return qpf::Engine::fastpath;
  throw qpf::validation_error("unknown engine '" + s + "' (expected auto, circuit, or fastpath)");
}

py::dict hybrid_dict(const qpf::HybridResult& r) {
  py::list branches;
  for (const auto& b : r.stats.branches) {
    py::dict row;
    row["bits"] = b.bits;
    row["joint"] = b.joint;
    row["cond"] = b.cond;
    branches.append(row);
  }
  py::list divergences;
  for (const auto& d : r.stats.divergence_log) {
    py::dict row;
    row["branch_a"] = d.branch_a;
    row["branch_b"] = d.branch_b;
    row["module"] = d.module;
    divergences.append(row);
  }
  py::dict out;
  out["n_modules"] = r.stats.n_modules;
  out["engine"] = r.stats.engine_used;
  out["branches"] = branches;
  out["leakage"] = r.stats.leakage;
  out["divergences"] = divergences;
  out["sign_residuals"] = r.calibration.residuals;
  out["ambiguous_rows"] = r.calibration.ambiguous_rows;
  out["solution"] = r.solution;
  out["n_e_exp"] = r.n_e_exp;
  out["n_e_theory"] = r.n_e_theory;
  return out;
}

py::dict record_dict(const qpf::ExperimentRecord& r) {
  py::dict out;
  out["algorithm"] = r.algorithm;
  out["n_accur"] = r.n_accur;
  out["m_prec"] = r.m_prec;
  out["n_redund"] = r.n_redund;
  out["n_module"] = r.n_module;
  out["qubit_total"] = r.qubit_total;
  out["qubit_medium"] = r.qubit_medium;
  out["n_e_exp"] = r.n_e_exp;
  out["n_e_theory"] = r.n_e_theory;
  out["postselect_top"] = r.postselect_top;
  out["postselect_medium"] = r.postselect_medium;
  out["leakage"] = r.leakage;
  out["shots"] = r.shots;
  out["seed"] = r.seed;
  out["skipped"] = r.skipped;
  out["error"] = r.error;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "DC power flow via phase-estimation linear solvers";

  py::register_exception<qpf::Error>(m, "QpfError", PyExc_ValueError);

  py::class_<qpf::ScaledDcSystem>(m, "System")
      .def_property_readonly("dimension", [](const qpf::ScaledDcSystem& s) { return s.dimension; })
      .def_property_readonly("scale_exponent",
                             [](const qpf::ScaledDcSystem& s) { return s.scale_exponent; })
      .def_property_readonly("c_p", [](const qpf::ScaledDcSystem& s) { return s.c_p; })
      .def_property_readonly("n_bottom", [](const qpf::ScaledDcSystem& s) { return s.n_bottom; })
      .def_property_readonly(
          "eigenvalues", [](const qpf::ScaledDcSystem& s) { return s.spectral.eigenvalues; })
      .def_property_readonly("classical_theta",
                             [](const qpf::ScaledDcSystem& s) { return s.classical_theta; })
      .def_property_readonly("classical_normalized",
                             [](const qpf::ScaledDcSystem& s) { return s.classical_normalized; });

  m.def("bundled_system", [] { return qpf::scale_system(qpf::bundled_five_bus()); },
        "five-bus benchmark system, reduced and scaled for the solvers");
  m.def("system_from_grid",
        [](const std::string& path) {
          return qpf::scale_system(qpf::build_b_matrix(qpf::load_grid_file(path)));
        },
        py::arg("path"), "load a bus/branch JSON description");
  m.def("system_from_matrix",
        [](const std::string& path) { return qpf::scale_system(qpf::load_matrix_file(path)); },
        py::arg("path"), "load a plain-text susceptance matrix + injections");

  m.def("solve_classical",
        [](const qpf::ScaledDcSystem& sys) {
          py::dict out;
          out["theta"] = sys.classical_theta;
          out["normalized"] = sys.classical_normalized;
          return out;
        },
        py::arg("system"));

  m.def("solve_hhl",
        [](const qpf::ScaledDcSystem& sys, int n_accur, int n_redund, const std::string& mode,
           long long shots, unsigned long long seed, const std::string& engine,
           double rotation_c) {
          qpf::HhlConfig cfg;
          cfg.n_accur = n_accur;
          cfg.n_redund = n_redund;
          cfg.mode = parse_mode(mode);
          cfg.shots = shots;
          cfg.seed = seed;
          cfg.engine = parse_engine(engine);
          cfg.rotation_c = rotation_c;
          const qpf::HhlResult r = qpf::solve_hhl(sys, cfg);
          py::dict out;
          out["engine"] = r.engine_used;
          out["normalized_solution"] = r.normalized_solution;
          out["postselect_top"] = r.postselect_top;
          out["postselect_medium"] = r.postselect_medium;
          out["zero_bin_mass"] = r.zero_bin_mass;
          out["n_e_exp"] = r.n_e_exp;
          out["n_e_theory"] = r.n_e_theory;
          out["sampled_signs_from_exact"] = r.sampled_signs_from_exact;
          return out;
        },
        py::arg("system"), py::arg("n_accur"), py::arg("n_redund"), py::arg("mode") = "exact",
        py::arg("shots") = 100000, py::arg("seed") = 0, py::arg("engine") = "auto",
        py::arg("rotation_c") = 0.0);

  m.def("solve_hspea",
        [](const qpf::ScaledDcSystem& sys, int n_accur, int n_redund, const std::string& mode,
           long long shots, unsigned long long seed, const std::string& engine, double tau_sign) {
          qpf::HybridConfig cfg;
          cfg.m_prec = n_accur;
          cfg.n_redund = n_redund;
          cfg.mode = parse_mode(mode);
          cfg.shots = shots;
          cfg.seed = seed;
          cfg.engine = parse_engine(engine);
          cfg.tau_sign = tau_sign;
          return hybrid_dict(qpf::solve_hspea(sys, cfg));
        },
        py::arg("system"), py::arg("n_accur"), py::arg("n_redund"), py::arg("mode") = "exact",
        py::arg("shots") = 100000, py::arg("seed") = 0, py::arg("engine") = "auto",
        py::arg("tau_sign") = 0.05);

  m.def("solve_hmpea",
        [](const qpf::ScaledDcSystem& sys, int m_prec, int n_redund, int n_accur,
           const std::string& mode, long long shots, unsigned long long seed, double tau_sign) {
          qpf::HybridConfig cfg;
          cfg.m_prec = m_prec;
          cfg.n_accur = n_accur;
          cfg.n_redund = n_redund;
          cfg.mode = parse_mode(mode);
          cfg.shots = shots;
          cfg.seed = seed;
          cfg.tau_sign = tau_sign;
          return hybrid_dict(qpf::solve_hmpea(sys, cfg));
        },
        py::arg("system"), py::arg("m_prec"), py::arg("n_redund"), py::arg("n_accur") = 1,
        py::arg("mode") = "exact", py::arg("shots") = 100000, py::arg("seed") = 0,
        py::arg("tau_sign") = 0.05);

  m.def("sweep",
        [](const qpf::ScaledDcSystem& sys, const std::string& algorithm,
           const std::vector<int>& precision_values, const std::vector<int>& redund_values,
           int n_accur, const std::string& mode, long long shots, unsigned long long seed,
           int jobs) {
          qpf::SweepSpec spec;
          spec.algorithm = qpf::parse_algorithm(algorithm);
          spec.precision_values = precision_values;
          spec.redund_values = redund_values;
          spec.n_accur = n_accur;
          spec.mode = parse_mode(mode);
          spec.shots = shots;
          spec.seed = seed;
          spec.jobs = jobs;
          py::list out;
          for (const auto& r : qpf::run_sweep(sys, spec)) out.append(record_dict(r));
          return out;
        },
        py::arg("system"), py::arg("algorithm"), py::arg("precision_values"),
        py::arg("redund_values"), py::arg("n_accur") = 1, py::arg("mode") = "exact",
        py::arg("shots") = 100000, py::arg("seed") = 0, py::arg("jobs") = 0);

  m.def("qubit_budget",
        [](const std::string& algorithm, int precision_bits, int n_accur, int n_redund,
           int n_bottom) {
          const qpf::QubitBudget b = qpf::qubit_budget(qpf::parse_algorithm(algorithm),
                                                       precision_bits, n_accur, n_redund,
                                                       n_bottom);
          py::dict out;
          out["qubit_total"] = b.qubit_total;
          out["qubit_medium"] = b.qubit_medium;
          out["exceeds_ceiling"] = b.exceeds_ceiling;
          out["ceiling"] = qpf::kQubitCeiling;
          return out;
        },
        py::arg("algorithm"), py::arg("precision_bits"), py::arg("n_accur"), py::arg("n_redund"),
        py::arg("n_bottom") = 2);

  m.def("failure_bound_single", &qpf::failure_bound_single, py::arg("n_redund"),
        "upper bound on the chance the estimate drifts out of tolerance");
  m.def("success_bound_multi", &qpf::success_bound_multi, py::arg("m_prec"), py::arg("n_accur"),
        py::arg("n_redund"), "lower bound on every module rounding correctly");

  m.def("lemma_check",
        [](const qpf::ScaledDcSystem& sys, int n_accur, int n_redund) {
          const qpf::LemmaReport rep = qpf::lemma_check(sys, n_accur, n_redund);
          py::list branches;
          for (const auto& b : rep.branches) {
            py::dict row;
            row["bits"] = b.bits;
            row["expected"] = b.expected;
            row["bin_probability"] = b.bin_probability;
            row["deviation"] = b.deviation;
            row["prefix_failure"] = b.prefix_failure;
            row["distance_failure"] = b.distance_failure;
            branches.append(row);
          }
          py::dict out;
          out["branches"] = branches;
          out["failure_bound"] = rep.failure_bound;
          out["max_deviation"] = rep.max_deviation;
          out["leakage"] = rep.leakage;
          out["distance_bound_satisfied"] = rep.distance_bound_satisfied;
          out["prefix_bound_satisfied"] = rep.prefix_bound_satisfied;
          return out;
        },
        py::arg("system"), py::arg("n_accur"), py::arg("n_redund"));

  m.def("run_acceptance",
        [](const qpf::ScaledDcSystem& sys) {
          const qpf::AcceptanceReport rep = qpf::run_acceptance(sys);
          py::list items;
          for (const auto& it : rep.items) {
            py::dict row;
            row["id"] = it.id;
            row["name"] = it.name;
            row["passed"] = it.passed;
            row["details"] = it.details;
            items.append(row);
          }
          py::dict out;
          out["all_passed"] = rep.all_passed;
          out["items"] = items;
          return out;
        },
        py::arg("system"), "run the pinned validation suite");
}
