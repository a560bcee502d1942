#include "qpf/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "qpf/harness.hpp"
#include "qpf/hhl.hpp"
#include "qpf/hybrid.hpp"
#include "qpf/qpe.hpp"
#include "qpf/statevector.hpp"

namespace qpf {
namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string vec_str(const Vec& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += fmt(v[i]);
  }
  return s + "]";
}

double max_abs_dev(const Vec& a, const Vec& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

std::string bits_of(double value, int width) {
  const auto v = static_cast<std::uint64_t>(std::floor(std::ldexp(value, width)));
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if ((v >> (width - 1 - b)) & 1) s[b] = '1';
  return s;
}

// reference values reproduced by the suite
const Vec kThetaRef = {0.0082, 0.0043, 0.0057, 0.0115};
const Vec kThetaNormRef = {0.5173, 0.2740, 0.3595, 0.7267};
const Vec kHhlSolutionRef = {0.5182, 0.2843, 0.3651, 0.7197};
const Vec kJointRef = {0.3681, 0.3001, 0.2114, 0.0921};
const Vec kModuleThetaRef = {0.0084, 0.0046, 0.0059, 0.0116};
const std::vector<std::string> kBitStringsRef = {"101110000", "011011011", "000111011",
                                                 "000010110"};
const std::vector<Vec> kEigvecAbsRef = {{0.7444, 0.1296, 0.0497, 0.6531},
                                        {0.0298, 0.6986, 0.6973, 0.1579},
                                        {0.5356, 0.3226, 0.4458, 0.6406},
                                        {0.3976, 0.6253, 0.5593, 0.3716}};

AcceptanceItem classical_reference_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{1, "classical-reference", false, ""};
  const DcSystem plain = bundled_five_bus();
  const auto t0 = std::chrono::steady_clock::now();
  const ClassicalReference ref = classical_reference(plain);
  const auto t1 = std::chrono::steady_clock::now();
  const double us = std::chrono::duration<double, std::micro>(t1 - t0).count();

  const double dev_theta = max_abs_dev(ref.theta, kThetaRef);
  const double dev_norm = max_abs_dev(ref.normalized, kThetaNormRef);
  item.passed = dev_theta <= 5e-4 && dev_norm <= 5e-4 && us < 1000.0;
  item.details = "theta " + vec_str(ref.theta) + " (max dev " + fmt(dev_theta) +
                 " vs 5e-4), normalized max dev " + fmt(dev_norm) + " vs 5e-4, solve " +
                 fmt(us) + " us vs 1000 us";
  (void)sys;
  return item;
}

AcceptanceItem bit_strings_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{2, "eigenvalue-bit-strings", false, ""};
  std::vector<std::string> observed;
  for (std::size_t j = sys.spectral.dim(); j-- > 0;)
    observed.push_back(bits_of(sys.spectral.eigenvalues[j], 9));
  bool ok = sys.scale_exponent == 9 && observed.size() == kBitStringsRef.size();
  std::string list;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    ok = ok && observed[j] == kBitStringsRef[j];
    if (j) list += " ";
    list += observed[j];
  }
  item.passed = ok;
  item.details = "scale exponent " + std::to_string(sys.scale_exponent) +
                 " vs 9, 9-bit strings " + list;
  return item;
}

AcceptanceItem theory_error_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{3, "truncation-error-theory", false, ""};
  const double n_e = relative_error(theoretical_solution(sys.spectral, 9),
                                    sys.classical_normalized);
  item.passed = std::abs(n_e - 0.0129) <= 5e-4;
  item.details = "n_e_theory(9 bits) = " + fmt(n_e) + " vs 0.0129 +- 0.0005";
  return item;
}

AcceptanceItem hhl_solution_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{4, "full-circuit-solution", false, ""};
  HhlConfig cfg;
  cfg.n_accur = 9;
  cfg.n_redund = 7;
  const HhlResult res = solve_hhl(sys, cfg);
  const double dev = max_abs_dev(res.normalized_solution, kHhlSolutionRef);
  item.passed = dev <= 5e-3 && std::abs(res.n_e_exp - 0.0130) <= 5e-3;
  item.details = "solution " + vec_str(res.normalized_solution) + " (max dev " + fmt(dev) +
                 " vs 0.005), n_e_exp = " + fmt(res.n_e_exp) + " vs 0.0130 +- 0.005, engine " +
                 res.engine_used;
  return item;
}

AcceptanceItem branch_statistics_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{5, "branch-statistics", false, ""};
  HybridConfig chain;
  chain.m_prec = 9;
  chain.n_accur = 3;
  chain.n_redund = 7;
  const HybridStatistics chained = run_hmpea(sys, chain);

  HybridConfig single;
  single.m_prec = 9;
  single.n_redund = 7;
  const HybridStatistics wide = run_hspea(sys, single);  // 16-bit register

  bool ok = chained.branches.size() == 4 && wide.branches.size() == 4;
  Vec joints, joints_wide;
  double dev_joint = 0.0, dev_u = 0.0;
  for (std::size_t j = 0; j < chained.branches.size() && ok; ++j) {
    joints.push_back(chained.branches[j].joint);
    joints_wide.push_back(wide.branches[j].joint);
    dev_joint = std::max(dev_joint, std::abs(chained.branches[j].joint - kJointRef[j]));
    ok = ok && chained.branches[j].bits == kBitStringsRef[j] &&
         wide.branches[j].bits == kBitStringsRef[j];
    for (std::size_t q = 0; q < sys.dimension; ++q) {
      dev_u = std::max(dev_u, std::abs(std::sqrt(chained.branches[j].cond[q]) -
                                       kEigvecAbsRef[j][q]));
      dev_u = std::max(dev_u,
                       std::abs(std::sqrt(wide.branches[j].cond[q]) - kEigvecAbsRef[j][q]));
    }
  }
  ok = ok && dev_joint <= 0.01 && std::abs(chained.leakage - 0.028) <= 0.01 && dev_u <= 0.02;
  item.passed = ok;
  item.details = "3-module joints " + vec_str(joints) + " (max dev " + fmt(dev_joint) +
                 " vs 0.01), leakage " + fmt(chained.leakage) +
                 " vs 0.028 +- 0.01, single-register joints " + vec_str(joints_wide) +
                 ", |u| max dev " + fmt(dev_u) + " vs 0.02";
  return item;
}

AcceptanceItem module_chain_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{6, "module-chain-solution", false, ""};
  HybridConfig cfg;
  cfg.m_prec = 9;
  cfg.n_accur = 1;
  cfg.n_redund = 7;
  const HybridResult exact = solve_hmpea(sys, cfg);
  const double dev = max_abs_dev(exact.solution, kModuleThetaRef);

  bool ok = dev <= 5e-4 && std::abs(exact.n_e_theory - 0.0285) <= 1e-3;
  std::string sampled_list;
  cfg.mode = RunMode::sampled;
  cfg.shots = 1000000;
  for (std::uint64_t seed = 1000; seed < 1005; ++seed) {
    cfg.seed = seed;
    const HybridResult run = solve_hmpea(sys, cfg);
    ok = ok && run.n_e_exp >= 0.015 && run.n_e_exp <= 0.04;
    if (!sampled_list.empty()) sampled_list += ", ";
    sampled_list += fmt(run.n_e_exp);
  }
  item.passed = ok;
  item.details = "theta " + vec_str(exact.solution) + " (max dev " + fmt(dev) +
                 " vs 5e-4), n_e_theory = " + fmt(exact.n_e_theory) +
                 " vs 0.0285 +- 0.001, sampled n_e over 5 seeds {" + sampled_list +
                 "} vs [0.015, 0.04]";
  return item;
}

AcceptanceItem success_rate_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{7, "success-rate-formulas", false, ""};
  const double multi = success_bound_multi(9, 1, 7);
  const double single = 1.0 - failure_bound_single(7);
  item.passed = std::abs(multi - 0.9648) <= 1e-4 && std::abs(single - 0.9960) <= 1e-4;
  item.details = "9-module bound " + fmt(multi) + " vs 0.9648 +- 1e-4, single bound " +
                 fmt(single) + " vs 0.9960 +- 1e-4";
  (void)sys;
  return item;
}

AcceptanceItem qubit_budget_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{8, "qubit-budgets", false, ""};
  const QubitBudget chain = qubit_budget(Algorithm::hmpea, 9, 1, 7, 2);
  const QubitBudget full = qubit_budget(Algorithm::hhl, 9, 9, 7, 2);
  const QubitBudget at14 = qubit_budget(Algorithm::hhl, 14, 14, 11, 2);
  const QubitBudget at15 = qubit_budget(Algorithm::hhl, 15, 15, 11, 2);
  const QubitBudget at16 = qubit_budget(Algorithm::hhl, 16, 16, 11, 2);
  item.passed = chain.qubit_total == 10 && full.qubit_medium == 16 && !at14.exceeds_ceiling &&
                at15.exceeds_ceiling && at16.exceeds_ceiling;
  item.details = "module-chain total " + std::to_string(chain.qubit_total) +
                 " vs 10, full-circuit medium " + std::to_string(full.qubit_medium) +
                 " vs 16, ceiling flags at 14/15/16 precision bits (n_redund 11): " +
                 std::to_string(at14.exceeds_ceiling) + std::to_string(at15.exceeds_ceiling) +
                 std::to_string(at16.exceeds_ceiling) + " vs 011";
  (void)sys;
  return item;
}

double qpe_tv_distance(const ScaledDcSystem& sys, int m) {
  const RegisterLayout layout{0, m, 0, sys.n_bottom};
  StateVector s = init_with_amplitudes(layout, sys.p);
  run_qpe_circuit(s, sys.spectral);
  const Vec circuit = marginal_probabilities(s, layout.medium_qubits());
  const Vec fast = fast_path_distribution(sys.spectral, m).distribution;
  double l1 = 0.0;
  for (std::size_t v = 0; v < fast.size(); ++v) l1 += std::abs(fast[v] - circuit[v]);
  return 0.5 * l1;
}

ScaledDcSystem random_system(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const std::size_t n = 2 + static_cast<std::size_t>(rng() % 7);  // 2..8
  std::vector<Vec> r(n, Vec(n));
  for (auto& row : r)
    for (double& x : row) x = 2.0 * uniform() - 1.0;
  SymMatrix m = SymMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = i == j ? 0.5 : 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += r[k][i] * r[k][j];
      m.at(i, j) = acc;
    }
  Vec p(n);
  double norm = 0.0;
  while (norm < 1e-3) {
    for (double& x : p) x = 2.0 * uniform() - 1.0;
    norm = norm2(p);
  }
  DcSystem d;
  d.b = std::move(m);
  d.p = std::move(p);
  for (std::size_t i = 0; i < n; ++i) d.bus_order.push_back(static_cast<int>(i) + 1);
  return scale_system(d);
}

AcceptanceItem kernel_equivalence_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{9, "kernel-vs-circuit-equivalence", false, ""};
  double worst = 0.0;
  int runs = 0;
  for (int m = 1; m + sys.n_bottom <= 14; ++m) {
    worst = std::max(worst, qpe_tv_distance(sys, m));
    ++runs;
  }
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ScaledDcSystem rnd = random_system(seed);
    for (int m = 1; m + rnd.n_bottom <= 14; ++m) {
      worst = std::max(worst, qpe_tv_distance(rnd, m));
      ++runs;
    }
  }
  item.passed = worst <= 1e-10;
  item.details = "worst total-variation distance " + fmt(worst) + " vs 1e-10 over " +
                 std::to_string(runs) + " register configurations (bundled + 20 random systems)";
  return item;
}

AcceptanceItem invariant_suite_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{10, "invariant-suite", false, ""};
  std::string notes;
  bool ok = true;

  {  // norm preservation through the unitary pipeline
    const RegisterLayout layout{1, 5, 4, sys.n_bottom};
    StateVector s = init_with_amplitudes(layout, sys.p);
    run_qpe_circuit(s, sys.spectral);
    Vec angles(1 << 5, 0.0);
    for (int a = 1; a < (1 << 5); ++a)
      angles[a] = 2.0 * std::asin(std::ldexp(1.0, -5) / std::ldexp(a, -5));
    // the failure bin rotates by zero; post-selection would discard it
    apply_multiplexed_rotation(s, layout.accuracy_qubits(), layout.top_qubits()[0], angles);
    apply_inverse_qft(s, layout.medium_qubits());
    const double drift = std::abs(s.norm_sq() - 1.0);
    ok = ok && drift <= 1e-10;
    notes += "norm drift " + fmt(drift);
  }

  {  // QFT then inverse QFT is the identity
    const RegisterLayout layout{1, 4, 3, 2};
    StateVector s = init_with_amplitudes(layout, Vec{1.0, 0.0, 0.0, 0.0});
    std::mt19937_64 rng(7);
    double norm = 0.0;
    for (auto& a : s.amp) {
      a = {static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5,
           static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5};
      norm += std::norm(a);
    }
    for (auto& a : s.amp) a /= std::sqrt(norm);
    const std::vector<std::complex<double>> before = s.amp;
    apply_qft(s, s.layout.medium_qubits(), false);
    apply_inverse_qft(s, s.layout.medium_qubits());
    double dev = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i) dev = std::max(dev, std::abs(s.amp[i] - before[i]));
    ok = ok && dev <= 1e-10;
    notes += ", transform round-trip dev " + fmt(dev);
  }

  {  // the rotation constant cancels out of the normalized solution
    HhlConfig a;
    a.n_accur = 9;
    a.n_redund = 7;
    a.engine = Engine::fastpath;
    a.rotation_c = std::ldexp(1.0, -9);
    HhlConfig b = a;
    b.rotation_c = std::ldexp(1.0, -10);
    const HhlResult ra = solve_hhl(sys, a);
    const HhlResult rb = solve_hhl(sys, b);
    const double dev = max_abs_dev(ra.normalized_solution, rb.normalized_solution);
    ok = ok && dev <= 1e-9;
    notes += ", rotation-constant dev " + fmt(dev);
  }

  {  // chunking independence + single-module equivalence
    HybridConfig cfg;
    cfg.m_prec = 9;
    cfg.n_redund = 7;
    std::vector<HybridResult> runs;
    for (int na : {1, 3, 9}) {
      cfg.n_accur = na;
      runs.push_back(solve_hmpea(sys, cfg));
    }
    double dev_cond = 0.0, dev_sol = 0.0;
    bool strings_equal = true;
    for (std::size_t a = 0; a < runs.size(); ++a)
      for (std::size_t b = a + 1; b < runs.size(); ++b) {
        dev_sol = std::max(dev_sol, max_abs_dev(runs[a].solution, runs[b].solution));
        for (std::size_t j = 0; j < runs[a].stats.branches.size(); ++j) {
          strings_equal = strings_equal &&
                          runs[a].stats.branches[j].bits == runs[b].stats.branches[j].bits;
          dev_cond = std::max(dev_cond, max_abs_dev(runs[a].stats.branches[j].cond,
                                                    runs[b].stats.branches[j].cond));
        }
      }
    ok = ok && strings_equal && dev_cond <= 1e-3 && dev_sol <= 5e-4;

    HybridConfig single;
    single.m_prec = 9;
    single.n_redund = 7;
    single.engine = Engine::circuit;
    const HybridStatistics circuit = run_hspea(sys, single);
    double dev_single = 0.0;
    const HybridStatistics& kraus = runs.back().stats;  // n_accur = 9: one module
    for (std::size_t j = 0; j < circuit.branches.size(); ++j) {
      dev_single = std::max(dev_single,
                            std::abs(circuit.branches[j].joint - kraus.branches[j].joint));
      dev_single =
          std::max(dev_single, max_abs_dev(circuit.branches[j].cond, kraus.branches[j].cond));
    }
    ok = ok && dev_single <= 1e-9;
    notes += ", chunking: strings " + std::string(strings_equal ? "equal" : "DIFFER") +
             ", cond dev " + fmt(dev_cond) + ", solution dev " + fmt(dev_sol) +
             ", engine dev " + fmt(dev_single);
  }

  {  // the spectral projections reconstruct the scaled injections
    const Vec rebuilt = sys.spectral.combine(sys.spectral.projections);
    const double dev = max_abs_dev(rebuilt, sys.p);
    ok = ok && dev <= 0.05;
    notes += ", injection reconstruction dev " + fmt(dev);
  }

  item.passed = ok;
  item.details = notes;
  return item;
}

AcceptanceItem trend_item(const ScaledDcSystem& sys) {
  AcceptanceItem item{11, "error-trend-reproduction", false, ""};
  bool ok = true;

  double worst_gap_full = 0.0;
  for (int na = 5; na <= 12; ++na) {
    HhlConfig cfg;
    cfg.n_accur = na;
    cfg.n_redund = 9;
    cfg.engine = Engine::fastpath;
    const HhlResult res = solve_hhl(sys, cfg);
    worst_gap_full = std::max(worst_gap_full, std::abs(res.n_e_exp - res.n_e_theory));
  }
  ok = ok && worst_gap_full <= 0.01;

  // module chain, sampled: gap between seed-mean error and the truncation
  // theory stays small through 12 bits, then widens once the theory error
  // falls below the estimation-failure floor
  std::vector<double> gap(17, 0.0), mean(17, 0.0), theory(17, 0.0);
  for (int m = 5; m <= 16; ++m) {
    HybridConfig cfg;
    cfg.m_prec = m;
    cfg.n_accur = 1;
    cfg.n_redund = 11;
    cfg.mode = RunMode::sampled;
    cfg.shots = 1000000;
    double acc = 0.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      cfg.seed = seed;
      acc += solve_hmpea(sys, cfg).n_e_exp;
    }
    mean[m] = acc / 3.0;
    theory[m] = hybrid_theory_error(sys, m);
    gap[m] = std::abs(mean[m] - theory[m]);
  }
  double worst_gap_low = 0.0;
  for (int m = 5; m <= 12; ++m) worst_gap_low = std::max(worst_gap_low, gap[m]);
  const double gap_mid = (gap[10] + gap[11] + gap[12]) / 3.0;
  const double gap_high = (gap[13] + gap[14] + gap[15] + gap[16]) / 4.0;
  bool diverges = gap_high > gap_mid;
  for (int m = 14; m <= 16; ++m) diverges = diverges && mean[m] >= 2.0 * theory[m];
  ok = ok && worst_gap_low <= 0.01 && diverges;

  item.passed = ok;
  item.details = "full-circuit |exp-theory| <= " + fmt(worst_gap_full) +
                 " vs 0.01 (precision 5..12, 9 redundant), module-chain gap <= " +
                 fmt(worst_gap_low) + " vs 0.01 (5..12 bits, 11 redundant), gap mean 13..16 = " +
                 fmt(gap_high) + " > gap mean 10..12 = " + fmt(gap_mid) +
                 ", errors at 14..16 bits = {" + fmt(mean[14]) + ", " + fmt(mean[15]) + ", " +
                 fmt(mean[16]) + "} vs >= 2x theory {" + fmt(theory[14]) + ", " +
                 fmt(theory[15]) + ", " + fmt(theory[16]) + "}";
  return item;
}

}  // namespace

AcceptanceReport run_acceptance(const ScaledDcSystem& sys) {
  using Runner = AcceptanceItem (*)(const ScaledDcSystem&);
  const Runner runners[] = {classical_reference_item, bit_strings_item,
                            theory_error_item,        hhl_solution_item,
                            branch_statistics_item,   module_chain_item,
                            success_rate_item,        qubit_budget_item,
                            kernel_equivalence_item,  invariant_suite_item,
                            trend_item};
  AcceptanceReport report;
  report.all_passed = true;
  int id = 1;
  for (const auto& run : runners) {
    AcceptanceItem item;
    try {
      item = run(sys);
    } catch (const std::exception& e) {
      item.id = id;
      item.name = "criterion-" + std::to_string(id);
      item.passed = false;
      item.details = std::string("exception: ") + e.what();
    }
    item.id = id++;
    report.all_passed = report.all_passed && item.passed;
    report.items.push_back(std::move(item));
  }
  return report;
}

std::string format_acceptance(const AcceptanceReport& report) {
  std::string out;
  int passed = 0;
  for (const auto& item : report.items) {
    out += item.passed ? "[PASS] " : "[FAIL] ";
    out += std::to_string(item.id) + ". " + item.name + ": " + item.details + "\n";
    passed += item.passed ? 1 : 0;
  }
  out += "ACCEPTANCE: " + std::to_string(passed) + "/" + std::to_string(report.items.size()) +
         " criteria passed\n";
  return out;
}

}  // namespace qpf
