#include "qpf/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "json.hpp"
#include "qpf/errors.hpp"
#include "qpf/hybrid.hpp"
#include "qpf/qpe.hpp"

namespace qpf {
namespace {

constexpr double kEmpty = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

ExperimentRecord blank_record(const SweepSpec& spec, int precision, int n_redund,
                              const QubitBudget& budget, std::uint64_t seed) {
  ExperimentRecord rec;
  rec.algorithm = algorithm_name(spec.algorithm);
  rec.n_accur = spec.algorithm == Algorithm::hmpea ? spec.n_accur : precision;
  rec.m_prec = precision;
  rec.n_redund = n_redund;
  rec.n_module = spec.algorithm == Algorithm::hmpea
                     ? (precision + spec.n_accur - 1) / spec.n_accur
                     : 1;
  rec.qubit_total = budget.qubit_total;
  rec.qubit_medium = budget.qubit_medium;
  rec.n_e_exp = kEmpty;
  rec.n_e_theory = kEmpty;
  rec.postselect_top = kEmpty;
  rec.postselect_medium = kEmpty;
  rec.leakage = kEmpty;
  rec.shots = spec.mode == RunMode::sampled ? spec.shots : 0;
  rec.seed = seed;
  return rec;
}

void run_point(const ScaledDcSystem& sys, const SweepSpec& spec, int precision, int n_redund,
               ExperimentRecord& rec) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto stamp = [&] {
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
  };
  try {
    if (spec.algorithm == Algorithm::hhl)
      rec.n_e_theory = relative_error(theoretical_solution(sys.spectral, precision),
                                      sys.classical_normalized);
    else
      rec.n_e_theory = hybrid_theory_error(sys, precision);
  } catch (const std::exception& e) {
    rec.error = e.what();
    stamp();
    return;
  }
  if (rec.skipped) {  // over the ceiling: keep the theory-only row
    stamp();
    return;
  }

  try {
    if (spec.algorithm == Algorithm::hhl) {
      HhlConfig cfg;
      cfg.n_accur = precision;
      cfg.n_redund = n_redund;
      cfg.mode = spec.mode;
      cfg.shots = spec.shots;
      cfg.seed = rec.seed;
      cfg.engine = Engine::fastpath;
      const HhlResult res = solve_hhl(sys, cfg);
      rec.n_e_exp = res.n_e_exp;
      rec.postselect_top = res.postselect_top;
      rec.postselect_medium = res.postselect_medium;
    } else {
      HybridConfig cfg;
      cfg.m_prec = precision;
      cfg.n_redund = n_redund;
      cfg.mode = spec.mode;
      cfg.shots = spec.shots;
      cfg.seed = rec.seed;
      if (spec.algorithm == Algorithm::hmpea) cfg.n_accur = spec.n_accur;
      const HybridResult res = spec.algorithm == Algorithm::hmpea ? solve_hmpea(sys, cfg)
                                                                  : solve_hspea(sys, cfg);
      rec.n_e_exp = res.n_e_exp;
      rec.leakage = res.stats.leakage;
    }
  } catch (const std::exception& e) {
    rec.error = e.what();
  }
  stamp();
}

}  // namespace

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::hhl: return "hhl";
    case Algorithm::hspea: return "hspea";
    case Algorithm::hmpea: return "hmpea";
  }
  throw validation_error("unknown algorithm");
}

Algorithm parse_algorithm(const std::string& name) {
  if (name == "hhl") return Algorithm::hhl;
  if (name == "hspea") return Algorithm::hspea;
  if (name == "hmpea") return Algorithm::hmpea;
  throw validation_error("unknown algorithm '" + name + "' (expected hhl, hspea, or hmpea)");
}

QubitBudget qubit_budget(Algorithm alg, int precision_bits, int n_accur, int n_redund,
                         int n_bottom) {
  if (precision_bits < 1) throw validation_error("precision must be >= 1");
  if (n_redund < 0) throw validation_error("n_redund must be >= 0");
  if (n_bottom < 1) throw validation_error("n_bottom must be >= 1");
  QubitBudget b;
  switch (alg) {
    case Algorithm::hhl:
      b.qubit_medium = precision_bits + n_redund;
      b.qubit_total = 1 + b.qubit_medium + n_bottom;
      break;
    case Algorithm::hspea:
      b.qubit_medium = precision_bits + n_redund;
      b.qubit_total = b.qubit_medium + n_bottom;
      break;
    case Algorithm::hmpea:
      if (n_accur < 1) throw validation_error("n_accur must be >= 1");
      b.qubit_medium = n_accur + n_redund;
      b.qubit_total = b.qubit_medium + n_bottom;
      break;
  }
  b.exceeds_ceiling = b.qubit_total > kQubitCeiling;
  return b;
}

std::vector<ExperimentRecord> run_sweep(const ScaledDcSystem& sys, const SweepSpec& spec) {
  if (spec.precision_values.empty() || spec.redund_values.empty()) return {};  // empty grid
  if (spec.algorithm == Algorithm::hmpea && spec.n_accur < 1)
    throw validation_error("n_accur must be >= 1");

  const std::size_t points = spec.precision_values.size() * spec.redund_values.size();
  std::vector<ExperimentRecord> records(points);
  for (std::size_t i = 0; i < points; ++i) {
    const int precision = spec.precision_values[i / spec.redund_values.size()];
    const int n_redund = spec.redund_values[i % spec.redund_values.size()];
    const int na = spec.algorithm == Algorithm::hmpea ? spec.n_accur : precision;
    QubitBudget budget;
    try {
      budget = qubit_budget(spec.algorithm, precision, na, n_redund, sys.n_bottom);
    } catch (const std::exception& e) {
      records[i] = blank_record(spec, precision, n_redund, QubitBudget{}, spec.seed + i);
      records[i].error = e.what();
      continue;
    }
    records[i] = blank_record(spec, precision, n_redund, budget, spec.seed + i);
    records[i].skipped = budget.exceeds_ceiling;
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < points; i = next.fetch_add(1)) {
      if (!records[i].error.empty()) continue;
      const int precision = spec.precision_values[i / spec.redund_values.size()];
      const int n_redund = spec.redund_values[i % spec.redund_values.size()];
      run_point(sys, spec, precision, n_redund, records[i]);
    }
  };

  std::size_t jobs = spec.jobs > 0 ? static_cast<std::size_t>(spec.jobs)
                                   : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, points);
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::string out =
      "algorithm,n_accur,m_prec,n_redund,n_module,qubit_total,qubit_medium,"
      "n_e_exp,n_e_theory,postselect_top,postselect_medium,leakage,shots,seed\n";
  for (const auto& r : records) {
    out += r.algorithm;
    out += ',' + std::to_string(r.n_accur);
    out += ',' + std::to_string(r.m_prec);
    out += ',' + std::to_string(r.n_redund);
    out += ',' + std::to_string(r.n_module);
    out += ',' + std::to_string(r.qubit_total);
    out += ',' + std::to_string(r.qubit_medium);
    out += ',' + format_double(r.n_e_exp);
    out += ',' + format_double(r.n_e_theory);
    out += ',' + format_double(r.postselect_top);
    out += ',' + format_double(r.postselect_medium);
    out += ',' + format_double(r.leakage);
    out += ',' + std::to_string(r.shots);
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::string records_to_json(const std::vector<ExperimentRecord>& records) {
  using json = nlohmann::ordered_json;
  const auto cell = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  json doc;
  doc["schema_version"] = 1;
  doc["records"] = json::array();
  for (const auto& r : records) {
    json row;
    row["algorithm"] = r.algorithm;
    row["n_accur"] = r.n_accur;
    row["m_prec"] = r.m_prec;
    row["n_redund"] = r.n_redund;
    row["n_module"] = r.n_module;
    row["qubit_total"] = r.qubit_total;
    row["qubit_medium"] = r.qubit_medium;
    row["n_e_exp"] = cell(r.n_e_exp);
    row["n_e_theory"] = cell(r.n_e_theory);
    row["postselect_top"] = cell(r.postselect_top);
    row["postselect_medium"] = cell(r.postselect_medium);
    row["leakage"] = cell(r.leakage);
    row["shots"] = r.shots;
    row["seed"] = r.seed;
    row["skipped"] = r.skipped;
    row["error"] = r.error;
    doc["records"].push_back(std::move(row));
  }
  return doc.dump(2) + "\n";
}

}  // namespace qpf
