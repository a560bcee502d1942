#include "qpf/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "qpf/errors.hpp"
#include "qpf/qpe.hpp"
#include "qpf/statevector.hpp"

namespace qpf {
namespace {

using Cd = std::complex<double>;

double frac(double x) { return x - std::floor(x); }

// phase seen by module i (1-based): frac(2^((i-1) n_accur) lambda); exact,
// since ldexp/floor/subtract introduce no rounding
double module_phase(double lambda, int module, int n_accur) {
  return frac(std::ldexp(lambda, (module - 1) * n_accur));
}

std::string bits_string(std::uint64_t value, int width) {
  std::string s(width, '0');
  for (int b = 0; b < width; ++b)
    if ((value >> (width - 1 - b)) & 1) s[b] = '1';
  return s;
}

std::uint64_t parse_bits(const std::string& s) {
  std::uint64_t v = 0;
  for (char c : s) v = (v << 1) | static_cast<std::uint64_t>(c == '1');
  return v;
}

std::vector<PairDivergence> build_divergence_log(const std::vector<HybridBranch>& branches,
                                                 int n_accur) {
  std::vector<PairDivergence> log;
  for (std::size_t a = 0; a < branches.size(); ++a)
    for (std::size_t b = a + 1; b < branches.size(); ++b) {
      const std::string& sa = branches[a].bits;
      const std::string& sb = branches[b].bits;
      for (std::size_t i = 0; i < sa.size(); ++i)
        if (sa[i] != sb[i]) {
          log.push_back({static_cast<int>(a), static_cast<int>(b),
                         static_cast<int>(i) / n_accur + 1});
          break;
        }
    }
  return log;
}

// eigen data in descending-eigenvalue order (branch 0 = largest eigenvalue)
struct EigenDesc {
  std::vector<double> lambda;
  std::vector<double> proj;
  std::vector<const Vec*> vec;  // vec[k] = eigenvector, components indexed by q
};

EigenDesc descending(const SpectralDecomposition& sd) {
  if (sd.projections.size() != sd.eigenvalues.size())
    throw validation_error("spectral decomposition carries no projection coefficients");
  EigenDesc e;
  const std::size_t n = sd.eigenvalues.size();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = n - 1 - j;
    e.lambda.push_back(sd.eigenvalues[src]);
    e.proj.push_back(sd.projections[src]);
    e.vec.push_back(&sd.eigenvectors[src]);
  }
  return e;
}

// concatenated per-module accuracy outcomes for the branch that tracks
// `lambda`: module i contributes floor(2^n_accur frac(2^((i-1) n_accur) lambda))
std::uint64_t oracle_record(double lambda, int modules, int n_accur) {
  std::uint64_t rec = 0;
  for (int i = 1; i <= modules; ++i) {
    const auto a =
        static_cast<std::uint64_t>(std::floor(std::ldexp(module_phase(lambda, i, n_accur), n_accur)));
    rec = (rec << n_accur) | a;
  }
  return rec;
}

void check_distinct(const std::vector<std::string>& bits, int width_desc) {
  for (std::size_t a = 0; a < bits.size(); ++a)
    for (std::size_t b = a + 1; b < bits.size(); ++b)
      if (bits[a] == bits[b])
        throw validation_error("branch collision: eigenvalues " + std::to_string(a) + " and " +
                               std::to_string(b) + " share the " + std::to_string(width_desc) +
                               "-bit prefix " + bits[a] + "; increase the estimated precision");
}

Vec conditional_for_phase(double phase, int m) {
  if (phase == 0.0) {
    Vec point(std::size_t{1} << m, 0.0);
    point[0] = 1.0;
    return point;
  }
  return qpe_conditional(phase, m);
}

// Exact statistics by evolving the bottom-register density matrix in the
// eigenbasis. Module measurements act diagonally there: projecting module i
// onto accuracy bin a multiplies rho elementwise by
//   T_kl = sum_{v in bin a} c_v(phi_ik) conj(c_v(phi_il)),
// so a branch's joint probability is the trace after its bin sequence and the
// conditional bottom distribution is the diagonal rotated to position basis.
HybridStatistics run_exact_kraus(const ScaledDcSystem& sys, int m_prec, int n_accur,
                                 int n_redund) {
  const EigenDesc eig = descending(sys.spectral);
  const int n = static_cast<int>(eig.lambda.size());
  const int modules = (m_prec + n_accur - 1) / n_accur;
  const int m = n_accur + n_redund;
  const std::uint64_t bin_size = std::uint64_t{1} << n_redund;
  const int shift = modules * n_accur - m_prec;

  std::vector<std::uint64_t> records(n);
  std::vector<std::string> bits(n);
  for (int j = 0; j < n; ++j) {
    records[j] = oracle_record(eig.lambda[j], modules, n_accur);
    bits[j] = bits_string(records[j] >> shift, m_prec);
  }
  check_distinct(bits, m_prec);

  std::vector<std::vector<double>> phase(modules, std::vector<double>(n));
  for (int i = 0; i < modules; ++i)
    for (int k = 0; k < n; ++k) phase[i][k] = module_phase(eig.lambda[k], i + 1, n_accur);

  HybridStatistics stats;
  stats.n_modules = modules;
  stats.engine_used = "kraus";

  std::vector<std::vector<Cd>> amp(n, std::vector<Cd>(bin_size));
  for (int j = 0; j < n; ++j) {
    std::vector<std::vector<Cd>> rho(n, std::vector<Cd>(n));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) rho[k][l] = eig.proj[k] * eig.proj[l];

    for (int i = 0; i < modules; ++i) {
      const std::uint64_t a =
          (records[j] >> static_cast<std::uint64_t>((modules - 1 - i) * n_accur)) &
          ((std::uint64_t{1} << n_accur) - 1);
      for (int k = 0; k < n; ++k)
        for (std::uint64_t r = 0; r < bin_size; ++r)
          amp[k][r] = qpe_amplitude(phase[i][k], m, (a << n_redund) + r);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Cd t = 0.0;
          for (std::uint64_t r = 0; r < bin_size; ++r) t += amp[k][r] * std::conj(amp[l][r]);
          rho[k][l] *= t;
        }
    }

    double joint = 0.0;
    for (int k = 0; k < n; ++k) joint += rho[k][k].real();
    if (joint < 1e-15)
      throw numerical_error("branch " + bits[j] + " has vanishing probability " +
                            std::to_string(joint));

    HybridBranch branch;
    branch.bits = bits[j];
    branch.joint = joint;
    branch.cond.assign(sys.dimension, 0.0);
    for (std::size_t q = 0; q < sys.dimension; ++q) {
      Cd acc = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) acc += rho[k][l] * (*eig.vec[k])[q] * (*eig.vec[l])[q];
      branch.cond[q] = std::max(0.0, acc.real() / joint);
    }
    stats.branches.push_back(std::move(branch));
  }

  double claimed = 0.0;
  for (const auto& b : stats.branches) claimed += b.joint;
  stats.leakage = 1.0 - claimed;
  stats.divergence_log = build_divergence_log(stats.branches, n_accur);
  return stats;
}

// Exact single-estimation statistics from the full statevector: one QPE, then
// the joint (accuracy register, bottom register) distribution.
HybridStatistics run_hspea_circuit(const ScaledDcSystem& sys, int n_accur, int n_redund) {
  const RegisterLayout layout{0, n_accur, n_redund, sys.n_bottom};
  layout.validate();
  StateVector s = init_with_amplitudes(layout, sys.p);
  run_qpe_circuit(s, sys.spectral);

  std::vector<int> qubits = layout.accuracy_qubits();
  const std::vector<int> bottom = layout.bottom_qubits();
  qubits.insert(qubits.end(), bottom.begin(), bottom.end());
  const Vec dist = marginal_probabilities(s, qubits);
  const std::size_t nb_states = std::size_t{1} << sys.n_bottom;

  const EigenDesc eig = descending(sys.spectral);
  const int n = static_cast<int>(eig.lambda.size());
  std::vector<std::string> bits(n);
  std::vector<std::uint64_t> bins(n);
  for (int j = 0; j < n; ++j) {
    bins[j] = static_cast<std::uint64_t>(std::floor(std::ldexp(eig.lambda[j], n_accur)));
    bits[j] = bits_string(bins[j], n_accur);
  }
  check_distinct(bits, n_accur);

  HybridStatistics stats;
  stats.n_modules = 1;
  stats.engine_used = "circuit";
  for (int j = 0; j < n; ++j) {
    double joint = 0.0;
    for (std::size_t b = 0; b < nb_states; ++b) joint += dist[bins[j] * nb_states + b];
    if (joint < 1e-15)
      throw numerical_error("branch " + bits[j] + " has vanishing probability " +
                            std::to_string(joint));
    HybridBranch branch;
    branch.bits = bits[j];
    branch.joint = joint;
    branch.cond.assign(sys.dimension, 0.0);
    for (std::size_t q = 0; q < sys.dimension; ++q)
      branch.cond[q] = dist[bins[j] * nb_states + q] / joint;
    stats.branches.push_back(std::move(branch));
  }
  double claimed = 0.0;
  for (const auto& b : stats.branches) claimed += b.joint;
  stats.leakage = 1.0 - claimed;
  stats.divergence_log = build_divergence_log(stats.branches, n_accur);
  return stats;
}

// Shot-resolved statistics. Each shot walks the module chain keeping the
// bottom register's eigenbasis coordinates: sample the module outcome v
// exactly (branch weights |alpha_k|^2, then the kernel conditional), collapse
// alpha_k by c_v(phi_ik), and finally measure the bottom register. Accuracy
// bins are then claimed greedily by observed frequency.
HybridStatistics run_sampled(const ScaledDcSystem& sys, int m_prec, int n_accur, int n_redund,
                             std::uint64_t shots, std::uint64_t seed) {
  const EigenDesc eig = descending(sys.spectral);
  const int n = static_cast<int>(eig.lambda.size());
  const int modules = (m_prec + n_accur - 1) / n_accur;
  const int m = n_accur + n_redund;
  const std::uint64_t m_states = std::uint64_t{1} << m;
  const int shift = modules * n_accur - m_prec;

  if (static_cast<std::uint64_t>(modules) * n * m_states > (std::uint64_t{1} << 24))
    throw resource_error(
        "sampled mode would need kernel tables beyond the memory budget at " +
        std::to_string(m) + " register bits; use exact mode or shrink the register");

  // per (module, eigenvalue): amplitude table and cumulative outcome table
  std::vector<std::vector<std::vector<Cd>>> amp(modules);
  std::vector<std::vector<Vec>> cum(modules);
  for (int i = 0; i < modules; ++i) {
    amp[i].resize(n);
    cum[i].resize(n);
    for (int k = 0; k < n; ++k) {
      const double phi = module_phase(eig.lambda[k], i + 1, n_accur);
      amp[i][k].resize(m_states);
      for (std::uint64_t v = 0; v < m_states; ++v) amp[i][k][v] = qpe_amplitude(phi, m, v);
      Vec c = conditional_for_phase(phi, m);
      std::partial_sum(c.begin(), c.end(), c.begin());
      cum[i][k] = std::move(c);
    }
  }

  std::mt19937_64 rng(seed);
  const auto uniform = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  // record value -> [count, bottom counts...]
  std::map<std::uint64_t, std::vector<std::uint64_t>> hist;
  std::vector<Cd> alpha(n);
  std::vector<double> w(n);
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    for (int k = 0; k < n; ++k) alpha[k] = eig.proj[k];
    std::uint64_t rec = 0;
    for (int i = 0; i < modules; ++i) {
      double total = 0.0;
      for (int k = 0; k < n; ++k) total += std::norm(alpha[k]);
      double u = uniform() * total;
      int k = 0;
      for (; k < n - 1; ++k) {
        u -= std::norm(alpha[k]);
        if (u < 0.0) break;
      }
      const Vec& c = cum[i][k];
      const double target = uniform() * c.back();
      const std::uint64_t v = std::min<std::uint64_t>(
          std::upper_bound(c.begin(), c.end(), target) - c.begin(), m_states - 1);
      rec = (rec << n_accur) | (v >> n_redund);
      double norm = 0.0;
      for (int l = 0; l < n; ++l) {
        alpha[l] *= amp[i][l][v];
        norm += std::norm(alpha[l]);
      }
      norm = std::sqrt(norm);
      for (int l = 0; l < n; ++l) alpha[l] /= norm;
    }

    double wsum = 0.0;
    for (std::size_t q = 0; q < sys.dimension; ++q) {
      Cd beta = 0.0;
      for (int k = 0; k < n; ++k) beta += alpha[k] * (*eig.vec[k])[q];
      w[q] = std::norm(beta);
      wsum += w[q];
    }
    double u = uniform() * wsum;
    std::size_t q = 0;
    for (; q < sys.dimension - 1; ++q) {
      u -= w[q];
      if (u < 0.0) break;
    }

    auto& slot = hist[rec >> shift];
    if (slot.empty()) slot.assign(1 + sys.dimension, 0);
    ++slot[0];
    ++slot[1 + q];
  }

  // greedy claims: descending count, record value breaking ties, until the
  // success bound's mass is covered or the system dimension is exhausted
  std::vector<std::pair<std::uint64_t, std::uint64_t>> order;  // (count, record)
  for (const auto& [rec, slot] : hist) order.emplace_back(slot[0], rec);
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  double threshold = 2.0;  // unreachable: claim up to the dimension
  if (n_redund >= 2)
    threshold = 1.0 - 2.0 * modules * failure_bound_single(n_redund);

  HybridStatistics stats;
  stats.n_modules = modules;
  stats.engine_used = "sampler";
  double claimed = 0.0;
  for (const auto& [count, rec] : order) {
    const auto& slot = hist.at(rec);
    HybridBranch branch;
    branch.bits = bits_string(rec, m_prec);
    branch.joint = static_cast<double>(count) / static_cast<double>(shots);
    branch.cond.assign(sys.dimension, 0.0);
    for (std::size_t q = 0; q < sys.dimension; ++q)
      branch.cond[q] = static_cast<double>(slot[1 + q]) / static_cast<double>(count);
    claimed += branch.joint;
    stats.branches.push_back(std::move(branch));
    if (claimed >= threshold || stats.branches.size() == sys.dimension) break;
  }
  stats.leakage = 1.0 - claimed;
  stats.divergence_log = build_divergence_log(stats.branches, n_accur);
  return stats;
}

void validate_hybrid(const HybridConfig& cfg, bool multi) {
  if (cfg.m_prec < 1 || cfg.m_prec > 30)
    throw validation_error("m_prec must be in [1, 30]");
  if (cfg.n_redund < 0) throw validation_error("n_redund must be >= 0");
  if (multi) {
    if (cfg.n_accur < 1 || cfg.n_accur > 30)
      throw validation_error("n_accur must be in [1, 30]");
  } else if (cfg.n_accur != 0 && cfg.n_accur != cfg.m_prec) {
    throw validation_error(
        "single-estimation runs put all m_prec bits in one register; leave n_accur unset");
  }
  if (cfg.mode == RunMode::sampled && cfg.shots == 0)
    throw validation_error("sampled mode requires shots >= 1");
}

HybridResult finish(const ScaledDcSystem& sys, const HybridConfig& cfg, HybridStatistics stats) {
  HybridResult r;
  r.calibration = calibrate_signs(stats, sys, cfg.tau_sign);
  r.solution = assemble_solution(stats, r.calibration, sys, cfg.m_prec);
  r.n_e_exp = relative_error(r.solution, sys.classical_theta);
  r.n_e_theory = hybrid_theory_error(sys, cfg.m_prec);
  r.stats = std::move(stats);
  return r;
}

}  // namespace

HybridStatistics run_hspea(const ScaledDcSystem& sys, const HybridConfig& cfg) {
  validate_hybrid(cfg, /*multi=*/false);
  if (cfg.mode == RunMode::sampled)
    return run_sampled(sys, cfg.m_prec, cfg.m_prec, cfg.n_redund, cfg.shots, cfg.seed);

  const RegisterLayout layout{0, cfg.m_prec, cfg.n_redund, sys.n_bottom};
  switch (cfg.engine) {
    case Engine::circuit:
      layout.validate();
      return run_hspea_circuit(sys, cfg.m_prec, cfg.n_redund);
    case Engine::fastpath:
      return run_exact_kraus(sys, cfg.m_prec, cfg.m_prec, cfg.n_redund);
    case Engine::automatic:
      break;
  }
  if (layout.total() <= simulator_qubit_cap())
    return run_hspea_circuit(sys, cfg.m_prec, cfg.n_redund);
  return run_exact_kraus(sys, cfg.m_prec, cfg.m_prec, cfg.n_redund);
}

HybridStatistics run_hmpea(const ScaledDcSystem& sys, const HybridConfig& cfg) {
  validate_hybrid(cfg, /*multi=*/true);
  if (cfg.engine == Engine::circuit)
    throw validation_error(
        "module-chained estimation has no single-circuit engine; use the default");
  if (cfg.mode == RunMode::sampled)
    return run_sampled(sys, cfg.m_prec, cfg.n_accur, cfg.n_redund, cfg.shots, cfg.seed);
  return run_exact_kraus(sys, cfg.m_prec, cfg.n_accur, cfg.n_redund);
}

SignCalibration calibrate_signs(const HybridStatistics& stats, const ScaledDcSystem& sys,
                                double tau_sign) {
  const std::size_t k_count = stats.branches.size();
  if (k_count == 0) throw validation_error("no branches claimed; cannot calibrate signs");
  if (k_count > 20)
    throw validation_error("sign search enumerates 2^K assignments; capped at K = 20 branches");
  if (!(tau_sign > 0.0) || tau_sign >= 1.0)
    throw validation_error("tau_sign must lie in (0, 1)");

  std::vector<Vec> mag(k_count, Vec(sys.dimension));
  for (std::size_t k = 0; k < k_count; ++k) {
    if (stats.branches[k].cond.size() != sys.dimension)
      throw validation_error("branch conditional size does not match the system dimension");
    for (std::size_t q = 0; q < sys.dimension; ++q)
      mag[k][q] = std::sqrt(std::max(0.0, stats.branches[k].joint) *
                            std::max(0.0, stats.branches[k].cond[q]));
  }

  SignCalibration cal;
  cal.signed_products.assign(k_count, Vec(sys.dimension, 0.0));
  cal.residuals.assign(sys.dimension, 0.0);

  const std::uint64_t masks = std::uint64_t{1} << k_count;
  for (std::size_t q = 0; q < sys.dimension; ++q) {
    const double target = sys.p[q];
    std::uint64_t winner = masks;
    double winner_res = 0.0, best_res = std::numeric_limits<double>::infinity();
    int passes = 0;
    // ascending masks = lexicographic over (n_1..n_K), branch 0 the most
    // significant bit; bit 1 negates the magnitude
    for (std::uint64_t mask = 0; mask < masks; ++mask) {
      double sum = 0.0;
      for (std::size_t k = 0; k < k_count; ++k)
        sum += ((mask >> (k_count - 1 - k)) & 1) ? -mag[k][q] : mag[k][q];
      const double res = std::abs(sum - target);
      best_res = std::min(best_res, res);
      if (res <= tau_sign) {
        ++passes;
        if (winner == masks) {
          winner = mask;
          winner_res = res;
        }
      }
    }
    if (winner == masks)
      throw numerical_error("sign calibration failed for component " + std::to_string(q) +
                            ": best residual " + std::to_string(best_res) +
                            " exceeds tau_sign = " + std::to_string(tau_sign));
    if (passes > 1) cal.ambiguous_rows.push_back(static_cast<int>(q));
    cal.residuals[q] = winner_res;
    for (std::size_t k = 0; k < k_count; ++k)
      cal.signed_products[k][q] = ((winner >> (k_count - 1 - k)) & 1) ? -mag[k][q] : mag[k][q];
  }
  return cal;
}

Vec assemble_solution(const HybridStatistics& stats, const SignCalibration& cal,
                      const ScaledDcSystem& sys, int m_prec) {
  if (cal.signed_products.size() != stats.branches.size())
    throw validation_error("calibration does not match the statistics it came from");
  Vec theta(sys.dimension, 0.0);
  for (std::size_t k = 0; k < stats.branches.size(); ++k) {
    const std::string& bits = stats.branches[k].bits;
    if (static_cast<int>(bits.size()) != m_prec)
      throw validation_error("branch bit width " + std::to_string(bits.size()) +
                             " does not match m_prec = " + std::to_string(m_prec));
    const std::uint64_t value = parse_bits(bits);
    if (value == 0)
      throw validation_error("claimed eigenvalue " + bits +
                             " is zero at this precision; the inversion is undefined");
    const double lambda_t = std::ldexp(static_cast<double>(value), -m_prec);
    for (std::size_t q = 0; q < sys.dimension; ++q)
      theta[q] += cal.signed_products[k][q] / lambda_t;
  }
  const double unscale = std::ldexp(1.0, -sys.scale_exponent) / sys.c_p;
  for (double& t : theta) t *= unscale;
  return theta;
}

Vec hybrid_theory_solution(const ScaledDcSystem& sys, int m_prec) {
  if (m_prec < 1 || m_prec > 30) throw validation_error("m_prec must be in [1, 30]");
  const SpectralDecomposition& sd = sys.spectral;
  if (sd.projections.size() != sd.eigenvalues.size())
    throw validation_error("spectral decomposition carries no projection coefficients");
  Vec coeff(sd.eigenvalues.size());
  for (std::size_t j = 0; j < coeff.size(); ++j) {
    const double truncated =
        std::ldexp(std::floor(std::ldexp(sd.eigenvalues[j], m_prec)), -m_prec);
    if (truncated <= 0.0)
      throw validation_error("eigenvalue " + std::to_string(j) + " truncates to zero at " +
                             std::to_string(m_prec) + " bits; increase m_prec");
    coeff[j] = sd.projections[j] / truncated;
  }
  Vec theta = sd.combine(coeff);
  const double unscale = std::ldexp(1.0, -sys.scale_exponent) / sys.c_p;
  for (double& t : theta) t *= unscale;
  return theta;
}

double hybrid_theory_error(const ScaledDcSystem& sys, int m_prec) {
  return relative_error(hybrid_theory_solution(sys, m_prec), sys.classical_theta);
}

HybridResult solve_hspea(const ScaledDcSystem& sys, const HybridConfig& cfg) {
  return finish(sys, cfg, run_hspea(sys, cfg));
}

HybridResult solve_hmpea(const ScaledDcSystem& sys, const HybridConfig& cfg) {
  return finish(sys, cfg, run_hmpea(sys, cfg));
}

LemmaReport lemma_check(const ScaledDcSystem& sys, int n_accur, int n_redund) {
  if (n_accur < 1) throw validation_error("n_accur must be >= 1");
  if (n_redund < 2)
    throw validation_error("the failure bound needs n_redund >= 2");
  const int m = n_accur + n_redund;
  if (m > 30) throw validation_error("register size n_accur + n_redund must stay <= 30");

  const EigenDesc eig = descending(sys.spectral);
  const int n = static_cast<int>(eig.lambda.size());
  const std::uint64_t m_states = std::uint64_t{1} << m;
  const std::uint64_t bin_size = std::uint64_t{1} << n_redund;

  std::vector<std::uint64_t> bins(n);
  std::vector<std::string> bits(n);
  std::vector<Vec> cond(n);
  for (int j = 0; j < n; ++j) {
    bins[j] = static_cast<std::uint64_t>(std::floor(std::ldexp(eig.lambda[j], n_accur)));
    bits[j] = bits_string(bins[j], n_accur);
    cond[j] = qpe_conditional(eig.lambda[j], m);
  }
  check_distinct(bits, n_accur);

  LemmaReport report;
  report.failure_bound = failure_bound_single(n_redund);
  const std::uint64_t max_dist = bin_size - 1;

  double claimed = 0.0;
  for (int j = 0; j < n; ++j) {
    LemmaBranch br;
    br.bits = bits[j];
    br.expected = eig.proj[j] * eig.proj[j];

    double bin_mass = 0.0;
    for (int k = 0; k < n; ++k) {
      double in_bin = 0.0;
      for (std::uint64_t r = 0; r < bin_size; ++r) in_bin += cond[k][(bins[j] << n_redund) + r];
      bin_mass += eig.proj[k] * eig.proj[k] * in_bin;
      if (k == j) br.prefix_failure = 1.0 - in_bin;
    }
    br.bin_probability = bin_mass;
    br.deviation = std::abs(bin_mass - br.expected);

    const auto truth = static_cast<std::uint64_t>(std::floor(std::ldexp(eig.lambda[j], m)));
    double far = 0.0;
    for (std::uint64_t v = 0; v < m_states; ++v) {
      const std::uint64_t d = v > truth ? v - truth : truth - v;
      if (std::min(d, m_states - d) > max_dist) far += cond[j][v];
    }
    br.distance_failure = far;

    claimed += bin_mass;
    report.branches.push_back(std::move(br));
  }
  report.leakage = 1.0 - claimed;
  report.max_deviation = 0.0;
  report.distance_bound_satisfied = true;
  report.prefix_bound_satisfied = true;
  for (const auto& br : report.branches) {
    report.max_deviation = std::max(report.max_deviation, br.deviation);
    if (br.distance_failure > report.failure_bound + 1e-12) report.distance_bound_satisfied = false;
    if (br.prefix_failure > report.failure_bound + 1e-12) report.prefix_bound_satisfied = false;
  }
  return report;
}

}  // namespace qpf
