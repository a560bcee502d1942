#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qpf/acceptance.hpp"
#include "qpf/dcpf.hpp"
#include "qpf/errors.hpp"
#include "qpf/harness.hpp"
#include "qpf/hhl.hpp"
#include "qpf/hybrid.hpp"
#include "qpf/qpe.hpp"

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string vec_str(const qpf::Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

struct SystemOpts {
  std::string grid_path;
  std::string matrix_path;
};

void add_system_opts(CLI::App* cmd, SystemOpts& opts) {
  auto* grid = cmd->add_option("--grid", opts.grid_path, "bus/branch JSON file");
  auto* matrix = cmd->add_option("--matrix", opts.matrix_path,
                                 "plain-text susceptance matrix + injections file");
  grid->excludes(matrix);
}

qpf::ScaledDcSystem load_system(const SystemOpts& opts) {
  if (!opts.grid_path.empty())
    return qpf::scale_system(qpf::build_b_matrix(qpf::load_grid_file(opts.grid_path)));
  if (!opts.matrix_path.empty())
    return qpf::scale_system(qpf::load_matrix_file(opts.matrix_path));
  return qpf::scale_system(qpf::bundled_five_bus());
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw qpf::validation_error("cannot open output file: " + path);
  f << text;
}

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

json hybrid_json(const qpf::HybridResult& r) {
  json out;
  out["n_modules"] = r.stats.n_modules;
  out["engine"] = r.stats.engine_used;
  out["branches"] = json::array();
  for (const auto& b : r.stats.branches) {
    json row;
    row["bits"] = b.bits;
    row["joint"] = b.joint;
    row["cond"] = b.cond;
    out["branches"].push_back(std::move(row));
  }
  out["leakage"] = r.stats.leakage;
  out["divergences"] = json::array();
  for (const auto& d : r.stats.divergence_log)
    out["divergences"].push_back({{"branch_a", d.branch_a},
                                  {"branch_b", d.branch_b},
                                  {"module", d.module}});
  out["sign_residuals"] = r.calibration.residuals;
  out["ambiguous_rows"] = r.calibration.ambiguous_rows;
  out["solution"] = r.solution;
  out["n_e_exp"] = r.n_e_exp;
  out["n_e_theory"] = r.n_e_theory;
  return out;
}

std::string hybrid_text(const qpf::HybridResult& r) {
  std::string out;
  out += "modules: " + std::to_string(r.stats.n_modules) +
         "  engine: " + r.stats.engine_used + "\n";
  for (std::size_t k = 0; k < r.stats.branches.size(); ++k) {
    const auto& b = r.stats.branches[k];
    qpf::Vec mags(b.cond.size());
    for (std::size_t q = 0; q < b.cond.size(); ++q) mags[q] = std::sqrt(b.cond[q]);
    out += "branch " + std::to_string(k + 1) + ": bits " + b.bits + "  joint " + fmt(b.joint) +
           "  |u| " + vec_str(mags) + "\n";
  }
  out += "leakage: " + fmt(r.stats.leakage) + "\n";
  for (const auto& d : r.stats.divergence_log)
    out += "branches " + std::to_string(d.branch_a + 1) + " and " + std::to_string(d.branch_b + 1) +
           " diverge at module " + std::to_string(d.module) + "\n";
  out += "sign residuals: " + vec_str(r.calibration.residuals) + "\n";
  if (!r.calibration.ambiguous_rows.empty()) {
    out += "ambiguous sign rows:";
    for (int q : r.calibration.ambiguous_rows) out += " " + std::to_string(q);
    out += "\n";
  }
  out += "solution: " + vec_str(r.solution) + "\n";
  out += "n_e_exp: " + fmt(r.n_e_exp) + "\n";
  out += "n_e_theory: " + fmt(r.n_e_theory) + "\n";
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"DC power flow via phase-estimation linear solvers"};
  app.require_subcommand(1);

  // solve-classical
  auto* classical = app.add_subcommand("solve-classical", "Gaussian-elimination reference");
  SystemOpts classical_sys;
  add_system_opts(classical, classical_sys);
  std::string classical_format = "text";
  classical->add_option("--format", classical_format, "text|json");

  // solve-hhl
  auto* hhl = app.add_subcommand("solve-hhl", "full-circuit eigenvalue-inversion solve");
  SystemOpts hhl_sys;
  add_system_opts(hhl, hhl_sys);
  qpf::HhlConfig hhl_cfg;
  std::string hhl_mode = "exact", hhl_engine = "auto", hhl_format = "text";
  hhl->add_option("--n-accur", hhl_cfg.n_accur, "accuracy qubits")->required();
  hhl->add_option("--n-redund", hhl_cfg.n_redund, "redundant qubits")->required();
  hhl->add_option("--mode", hhl_mode, "exact|sampled");
  hhl->add_option("--shots", hhl_cfg.shots, "sampled-mode shot count");
  hhl->add_option("--seed", hhl_cfg.seed, "sampled-mode RNG seed");
  hhl->add_option("--engine", hhl_engine, "auto|circuit|fastpath");
  hhl->add_option("--rotation-c", hhl_cfg.rotation_c, "rotation constant (default 2^-n_accur)");
  hhl->add_option("--format", hhl_format, "text|json");

  // solve-hspea
  auto* hspea = app.add_subcommand("solve-hspea", "single estimation + joint measurement solve");
  SystemOpts hspea_sys;
  add_system_opts(hspea, hspea_sys);
  qpf::HybridConfig hspea_cfg;
  std::string hspea_mode = "exact", hspea_engine = "auto", hspea_format = "text";
  hspea->add_option("--n-accur", hspea_cfg.m_prec, "accuracy qubits (= precision bits)")
      ->required();
  hspea->add_option("--n-redund", hspea_cfg.n_redund, "redundant qubits")->required();
  hspea->add_option("--mode", hspea_mode, "exact|sampled");
  hspea->add_option("--shots", hspea_cfg.shots, "sampled-mode shot count");
  hspea->add_option("--seed", hspea_cfg.seed, "sampled-mode RNG seed");
  hspea->add_option("--engine", hspea_engine, "auto|circuit|fastpath (exact mode)");
  hspea->add_option("--tau-sign", hspea_cfg.tau_sign, "sign-search residual tolerance");
  hspea->add_option("--format", hspea_format, "text|json");

  // solve-hmpea
  auto* hmpea = app.add_subcommand("solve-hmpea", "chained estimation-module solve");
  SystemOpts hmpea_sys;
  add_system_opts(hmpea, hmpea_sys);
  qpf::HybridConfig hmpea_cfg;
  hmpea_cfg.n_accur = 1;
  std::string hmpea_mode = "exact", hmpea_format = "text";
  hmpea->add_option("--m-prec", hmpea_cfg.m_prec, "total estimated eigenvalue bits")->required();
  hmpea->add_option("--n-accur", hmpea_cfg.n_accur, "accuracy qubits per module (default 1)");
  hmpea->add_option("--n-redund", hmpea_cfg.n_redund, "redundant qubits")->required();
  hmpea->add_option("--mode", hmpea_mode, "exact|sampled");
  hmpea->add_option("--shots", hmpea_cfg.shots, "sampled-mode shot count");
  hmpea->add_option("--seed", hmpea_cfg.seed, "sampled-mode RNG seed");
  hmpea->add_option("--tau-sign", hmpea_cfg.tau_sign, "sign-search residual tolerance");
  hmpea->add_option("--format", hmpea_format, "text|json");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter-grid experiment batch");
  SystemOpts sweep_sys;
  add_system_opts(sweep, sweep_sys);
  std::string sweep_alg, sweep_mode = "exact", sweep_format = "csv", sweep_out;
  int prec_min = 0, prec_max = 0;
  std::vector<int> sweep_redund;
  qpf::SweepSpec spec;
  bool strict = false;
  sweep->add_option("--algorithm", sweep_alg, "hhl|hspea|hmpea")->required();
  sweep->add_option("--precision-min", prec_min, "first precision value (accuracy bits)")
      ->required();
  sweep->add_option("--precision-max", prec_max, "last precision value (inclusive)")->required();
  sweep->add_option("--n-redund", sweep_redund, "redundant-qubit values (repeatable)")
      ->required();
  sweep->add_option("--n-accur", spec.n_accur, "per-module accuracy bits (hmpea, default 1)");
  sweep->add_option("--mode", sweep_mode, "exact|sampled");
  sweep->add_option("--shots", spec.shots, "sampled-mode shot count");
  sweep->add_option("--seed", spec.seed, "base seed; point seed = base + grid index");
  sweep->add_option("--jobs", spec.jobs, "worker threads (default: hardware)");
  sweep->add_option("--format", sweep_format, "csv|json");
  sweep->add_option("--out", sweep_out, "output path (default stdout)");
  sweep->add_flag("--strict", strict, "exit 4 when any point is skipped over the qubit ceiling");

  // budget
  auto* budget = app.add_subcommand("budget", "qubit requirements for a configuration");
  std::string budget_alg;
  int budget_prec = 0, budget_redund = 0, budget_accur = 0, budget_bottom = 2;
  std::string budget_format = "text";
  budget->add_option("--algorithm", budget_alg, "hhl|hspea|hmpea")->required();
  budget->add_option("--precision", budget_prec, "precision bits")->required();
  budget->add_option("--n-redund", budget_redund, "redundant qubits")->required();
  budget->add_option("--n-accur", budget_accur, "per-module accuracy bits (hmpea, default 1)");
  budget->add_option("--n-bottom", budget_bottom, "solution-register qubits (default 2)");
  budget->add_option("--format", budget_format, "text|json");

  // success-surface
  auto* surface = app.add_subcommand("success-surface",
                                     "estimation success bound over a parameter grid");
  int surf_m = 0, accur_lo = 1, accur_hi = 0, redund_lo = 2, redund_hi = 0;
  std::string surface_out;
  surface->add_option("--m-prec", surf_m, "total estimated bits")->required();
  surface->add_option("--accur-min", accur_lo, "smallest per-module accuracy size");
  surface->add_option("--accur-max", accur_hi, "largest per-module accuracy size")->required();
  surface->add_option("--redund-min", redund_lo, "smallest redundant count");
  surface->add_option("--redund-max", redund_hi, "largest redundant count")->required();
  surface->add_option("--out", surface_out, "output path (default stdout)");

  // acceptance
  auto* accept = app.add_subcommand("acceptance", "run the pinned validation suite");
  SystemOpts accept_sys;
  add_system_opts(accept, accept_sys);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the error message
    return code == 0 ? 0 : 2;     // bad invocation -> exit 2, like other validation errors
  }

  if (classical->parsed()) {
    const qpf::ScaledDcSystem sys = load_system(classical_sys);
    if (classical_format == "json") {
      json out;
      out["theta"] = sys.classical_theta;
      out["normalized"] = sys.classical_normalized;
      std::cout << out.dump(2) << "\n";
    } else if (classical_format == "text") {
      std::cout << "theta: " << vec_str(sys.classical_theta) << "\n";
      std::cout << "normalized: " << vec_str(sys.classical_normalized) << "\n";
    } else {
      throw qpf::validation_error("unknown format '" + classical_format + "'");
    }
    return 0;
  }

  if (hhl->parsed()) {
    hhl_cfg.mode = parse_mode(hhl_mode);
    hhl_cfg.engine = parse_engine(hhl_engine);
    const qpf::ScaledDcSystem sys = load_system(hhl_sys);
    const qpf::HhlResult res = qpf::solve_hhl(sys, hhl_cfg);
    if (hhl_format == "json") {
      json out;
      out["engine"] = res.engine_used;
      out["normalized_solution"] = res.normalized_solution;
      out["postselect_top"] = res.postselect_top;
      out["postselect_medium"] = res.postselect_medium;
      out["zero_bin_mass"] = res.zero_bin_mass;
      out["n_e_exp"] = res.n_e_exp;
      out["n_e_theory"] = res.n_e_theory;
      out["sampled_signs_from_exact"] = res.sampled_signs_from_exact;
      std::cout << out.dump(2) << "\n";
    } else if (hhl_format == "text") {
      std::cout << "engine: " << res.engine_used << "\n";
      std::cout << "normalized solution: " << vec_str(res.normalized_solution) << "\n";
      std::cout << "postselect top: " << fmt(res.postselect_top)
                << "  medium|top: " << fmt(res.postselect_medium) << "\n";
      std::cout << "zero-bin mass: " << fmt(res.zero_bin_mass) << "\n";
      std::cout << "n_e_exp: " << fmt(res.n_e_exp) << "  n_e_theory: " << fmt(res.n_e_theory)
                << "\n";
    } else {
      throw qpf::validation_error("unknown format '" + hhl_format + "'");
    }
    return 0;
  }

  if (hspea->parsed() || hmpea->parsed()) {
    const bool multi = hmpea->parsed();
    qpf::HybridConfig cfg = multi ? hmpea_cfg : hspea_cfg;
    cfg.mode = parse_mode(multi ? hmpea_mode : hspea_mode);
    if (!multi) cfg.engine = parse_engine(hspea_engine);
    const std::string format = multi ? hmpea_format : hspea_format;
    const qpf::ScaledDcSystem sys = load_system(multi ? hmpea_sys : hspea_sys);
    const qpf::HybridResult res =
        multi ? qpf::solve_hmpea(sys, cfg) : qpf::solve_hspea(sys, cfg);
    if (format == "json")
      std::cout << hybrid_json(res).dump(2) << "\n";
    else if (format == "text")
      std::cout << hybrid_text(res);
    else
      throw qpf::validation_error("unknown format '" + format + "'");
    return 0;
  }

  if (sweep->parsed()) {
    spec.algorithm = qpf::parse_algorithm(sweep_alg);
    spec.mode = parse_mode(sweep_mode);
    if (prec_min > prec_max)
      throw qpf::validation_error("--precision-min must be <= --precision-max");
    for (int p = prec_min; p <= prec_max; ++p) spec.precision_values.push_back(p);
    spec.redund_values = sweep_redund;
    const qpf::ScaledDcSystem sys = load_system(sweep_sys);
    const std::vector<qpf::ExperimentRecord> records = qpf::run_sweep(sys, spec);
    if (sweep_format == "csv")
      write_output(sweep_out, qpf::records_to_csv(records));
    else if (sweep_format == "json")
      write_output(sweep_out, qpf::records_to_json(records));
    else
      throw qpf::validation_error("unknown format '" + sweep_format + "'");
    if (strict)
      for (const auto& r : records)
        if (r.skipped) return 4;
    return 0;
  }

  if (budget->parsed()) {
    const qpf::Algorithm alg = qpf::parse_algorithm(budget_alg);
    if (budget_accur == 0)
      budget_accur = alg == qpf::Algorithm::hmpea ? 1 : budget_prec;
    const qpf::QubitBudget b =
        qpf::qubit_budget(alg, budget_prec, budget_accur, budget_redund, budget_bottom);
    if (budget_format == "json") {
      json out;
      out["qubit_total"] = b.qubit_total;
      out["qubit_medium"] = b.qubit_medium;
      out["exceeds_ceiling"] = b.exceeds_ceiling;
      out["ceiling"] = qpf::kQubitCeiling;
      std::cout << out.dump(2) << "\n";
    } else if (budget_format == "text") {
      std::cout << "total qubits: " << b.qubit_total << "\n";
      std::cout << "medium-only (accuracy + redundant): " << b.qubit_medium << "\n";
      if (alg == qpf::Algorithm::hhl)
        std::cout << "note: medium-only excludes the rotation ancilla and the "
                     "solution register; total includes both\n";
      if (b.exceeds_ceiling)
        std::cout << "exceeds the " << qpf::kQubitCeiling << "-qubit ceiling\n";
    } else {
      throw qpf::validation_error("unknown format '" + budget_format + "'");
    }
    return 0;
  }

  if (surface->parsed()) {
    const auto cells = qpf::success_surface(surf_m, accur_lo, accur_hi, redund_lo, redund_hi);
    std::string out = "n_accur,n_redund,n_module,p_success\n";
    for (const auto& c : cells)
      out += std::to_string(c.n_accur) + ',' + std::to_string(c.n_redund) + ',' +
             std::to_string(c.n_module) + ',' + fmt(c.p_success) + '\n';
    write_output(surface_out, out);
    return 0;
  }

  // acceptance
  const qpf::AcceptanceReport report = qpf::run_acceptance(load_system(accept_sys));
  std::cout << qpf::format_acceptance(report);
  return report.all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qpf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
