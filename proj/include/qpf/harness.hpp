#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpf/dcpf.hpp"
#include "qpf/hhl.hpp"

namespace qpf {

enum class Algorithm { hhl, hspea, hmpea };

std::string algorithm_name(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

// Hardware-era feasibility line: runs above this total are recorded but not
// executed.
inline constexpr int kQubitCeiling = 28;

struct QubitBudget {
  int qubit_total = 0;
  int qubit_medium = 0;  // estimation register alone (accuracy + redundant)
  bool exceeds_ceiling = false;
};

// hhl: 1 + n_accur + n_redund + n_bottom (ancilla + estimation + solution);
// hspea/hmpea: n_accur + n_redund + n_bottom (one module's registers; modules
// reuse them sequentially).
QubitBudget qubit_budget(Algorithm alg, int precision_bits, int n_accur, int n_redund,
                         int n_bottom);

struct ExperimentRecord {
  std::string algorithm;
  int n_accur = 0;
  int m_prec = 0;
  int n_redund = 0;
  int n_module = 1;
  int qubit_total = 0;
  int qubit_medium = 0;
  double n_e_exp = 0.0;
  double n_e_theory = 0.0;
  double postselect_top = 0.0;
  double postselect_medium = 0.0;
  double leakage = 0.0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  bool skipped = false;   // over the qubit ceiling: theory only
  std::string error;      // non-empty when the point failed outright
  double wall_ms = 0.0;   // internal bookkeeping; never serialized
};

struct SweepSpec {
  Algorithm algorithm = Algorithm::hhl;
  std::vector<int> precision_values;  // n_accur for hhl/hspea, m_prec for hmpea
  std::vector<int> redund_values;
  int n_accur = 1;  // per-module accuracy bits (hmpea only)
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;  // point seed = seed + grid index
  int jobs = 0;            // worker threads; 0 = hardware concurrency
};

// Grid order: precision-major, redundancy-minor; one record per point, in
// grid order regardless of thread scheduling. Failures are captured in the
// record, never thrown.
std::vector<ExperimentRecord> run_sweep(const ScaledDcSystem& sys, const SweepSpec& spec);

// Fixed column set, `%.12g` floats, empty cells for skipped/failed metrics;
// byte-stable for a given input and spec.
std::string records_to_csv(const std::vector<ExperimentRecord>& records);
std::string records_to_json(const std::vector<ExperimentRecord>& records);

}  // namespace qpf
