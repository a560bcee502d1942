#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpf/dcpf.hpp"
#include "qpf/hhl.hpp"
#include "qpf/linalg.hpp"

namespace qpf {

struct HybridConfig {
  int m_prec = 0;    // total estimated bits; equals the accuracy size for single-estimation runs
  int n_accur = 0;   // per-module accuracy bits (multi-estimation); 0 defaults sensibly per op
  int n_redund = 0;
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  Engine engine = Engine::automatic;  // exact single-estimation only: circuit vs closed form
  double tau_sign = 0.05;             // residual tolerance of the sign search
};

struct HybridBranch {
  std::string bits;  // m_prec-character binary string, MSB first
  double joint = 0.0;  // probability of this measurement record
  Vec cond;            // conditional bottom distribution over the N solution components
};

// first module at which two claimed branches show different accuracy bits
struct PairDivergence {
  int branch_a = 0;
  int branch_b = 0;
  int module = 0;  // 1-based
};

struct HybridStatistics {
  std::vector<HybridBranch> branches;
  double leakage = 0.0;  // probability mass outside the claimed branches
  int n_modules = 1;
  std::vector<PairDivergence> divergence_log;
  std::string engine_used;  // "circuit" | "kraus" | "sampler"
};

struct SignCalibration {
  std::vector<Vec> signed_products;  // [k][q] = s_kq * sqrt(joint_k * cond_kq)
  Vec residuals;                     // per-component residual of the winning assignment
  std::vector<int> ambiguous_rows;   // components where more than one assignment passed
};

// Estimation phase. Branch order: descending eigenvalue in exact mode,
// descending observed frequency in sampled mode.
HybridStatistics run_hspea(const ScaledDcSystem& sys, const HybridConfig& cfg);
HybridStatistics run_hmpea(const ScaledDcSystem& sys, const HybridConfig& cfg);

// Per solution component, searches the 2^K sign assignments (K = branch
// count) for the lexicographically first one whose reconstruction of the
// scaled injection vector lands within tau_sign; extra passes are flagged.
SignCalibration calibrate_signs(const HybridStatistics& stats,
                                const ScaledDcSystem& sys, double tau_sign);

// Physical-unit solution: theta_q = sum_k signed[k][q] / lambda_tilde_k,
// undone through the matrix scaling and the injection normalization.
Vec assemble_solution(const HybridStatistics& stats, const SignCalibration& cal,
                      const ScaledDcSystem& sys, int m_prec);

// Truncation-only reference: exact magnitudes and signs, eigenvalues floored
// to m_prec bits.
Vec hybrid_theory_solution(const ScaledDcSystem& sys, int m_prec);
double hybrid_theory_error(const ScaledDcSystem& sys, int m_prec);

struct HybridResult {
  HybridStatistics stats;
  SignCalibration calibration;
  Vec solution;  // physical units
  double n_e_exp = 0.0;
  double n_e_theory = 0.0;
};

// run + calibrate + assemble + error bookkeeping
HybridResult solve_hspea(const ScaledDcSystem& sys, const HybridConfig& cfg);
HybridResult solve_hmpea(const ScaledDcSystem& sys, const HybridConfig& cfg);

struct LemmaBranch {
  std::string bits;              // n_accur-bit prefix of the eigenvalue
  double expected = 0.0;         // squared projection coefficient
  double bin_probability = 0.0;  // measured mass of the prefix bin
  double deviation = 0.0;        // |bin_probability - expected|
  double prefix_failure = 0.0;   // branch mass escaping its own prefix bin
  double distance_failure = 0.0; // branch mass beyond 2^n_redund - 1 grid steps
};

struct LemmaReport {
  std::vector<LemmaBranch> branches;
  double failure_bound = 0.0;  // (2 (2^n_redund - 2))^-1
  double max_deviation = 0.0;
  double leakage = 0.0;
  bool distance_bound_satisfied = false;  // distance_failure <= bound, every branch
  bool prefix_bound_satisfied = false;    // prefix_failure <= bound, every branch
};

// Redundancy-qubit guarantee on a single estimation register of
// n_accur + n_redund bits, checked in both the grid-distance form (which the
// bound proves) and the bin-prefix form (reported; can exceed the bound).
LemmaReport lemma_check(const ScaledDcSystem& sys, int n_accur, int n_redund);

}  // namespace qpf
