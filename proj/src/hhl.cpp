#include "qpf/hhl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "qpf/errors.hpp"
#include "qpf/qpe.hpp"
#include "qpf/statevector.hpp"

namespace qpf {
namespace {

void validate_config(const ScaledDcSystem& sys, const HhlConfig& cfg) {
  if (cfg.n_accur < 1) throw validation_error("n_accur must be >= 1");
  if (cfg.n_redund < 0) throw validation_error("n_redund must be >= 0");
  if (cfg.rotation_c < 0.0)
    throw validation_error("rotation constant must be positive");
  double c = cfg.rotation_c;
  if (c > 0.0 && c > std::ldexp(1.0, -cfg.n_accur) + 1e-15)
    throw validation_error(
        "rotation constant exceeds 2^-n_accur; arcsin argument would leave [0,1]");
  if (cfg.mode == RunMode::sampled && cfg.shots == 0)
    throw validation_error("sampled mode requires shots >= 1");
  (void)sys;
}

double rotation_constant(const HhlConfig& cfg) {
  return cfg.rotation_c > 0.0 ? cfg.rotation_c : std::ldexp(1.0, -cfg.n_accur);
}

// sin(theta_a) per accuracy-register value a: C / (a 2^-n_accur). The
// all-zeros bin has no inverse; it stays NaN here and each engine handles it
// (closed form skips it, the circuit rotates by zero and post-selects it away).
std::vector<double> inversion_sines(int n_accur, double c) {
  const std::uint64_t bins = std::uint64_t{1} << n_accur;
  std::vector<double> s(bins);
  s[0] = std::numeric_limits<double>::quiet_NaN();
  for (std::uint64_t a = 1; a < bins; ++a)
    s[a] = c / std::ldexp(static_cast<double>(a), -n_accur);
  return s;
}

struct EngineOutput {
  Vec solution;  // signed, unit norm
  double postselect_top = 0.0;
  double postselect_medium = 0.0;
  double zero_bin_mass = 0.0;
};

// Closed-form evaluation in the eigenbasis. For eigenvalue lambda_j the
// m-qubit estimation register lands on value v with probability |c_v|^2; the
// branch survives both post-selections with amplitude g_j = sum_v |c_v|^2
// sin(theta_v), so the final bottom state is proportional to
// sum_j p_j g_j u_j and P(top=1) = sum_j p_j^2 sum_v |c_v|^2 sin^2(theta_v).
EngineOutput run_fastpath(const ScaledDcSystem& sys, const HhlConfig& cfg) {
  const SpectralDecomposition& sd = sys.spectral;
  const int m = cfg.n_accur + cfg.n_redund;
  const std::vector<double> sines = inversion_sines(cfg.n_accur, rotation_constant(cfg));

  const std::size_t n = sd.eigenvalues.size();
  Vec g(n, 0.0);
  double p_top = 0.0, zero_mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Vec cond = qpe_conditional(sd.eigenvalues[j], m);
    double gj = 0.0, s2 = 0.0, zero = 0.0;
    for (std::size_t v = 0; v < cond.size(); ++v) {
      const std::uint64_t a = v >> cfg.n_redund;
      if (a == 0) {
        zero += cond[v];
        continue;
      }
      gj += cond[v] * sines[a];
      s2 += cond[v] * sines[a] * sines[a];
    }
    g[j] = gj;
    const double w = sd.projections[j] * sd.projections[j];
    p_top += w * s2;
    zero_mass += w * zero;
  }
  if (p_top <= 1e-300)
    throw numerical_error("post-selection on the rotation ancilla has zero probability");

  double p_med = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    p_med += sd.projections[j] * sd.projections[j] * g[j] * g[j];
  p_med /= p_top;

  Vec coeff(n);
  for (std::size_t j = 0; j < n; ++j) coeff[j] = sd.projections[j] * g[j];
  EngineOutput out;
  out.solution = normalized(sd.combine(coeff));
  out.postselect_top = p_top;
  out.postselect_medium = p_med;
  out.zero_bin_mass = zero_mass;
  return out;
}

EngineOutput run_circuit(const ScaledDcSystem& sys, const HhlConfig& cfg) {
  const RegisterLayout layout{1, cfg.n_accur, cfg.n_redund, sys.n_bottom};
  StateVector s = init_with_amplitudes(layout, sys.p);

  run_qpe_circuit(s, sys.spectral);

  // Angle table for the eigenvalue-keyed rotation. The all-zeros bin cannot
  // be inverted; rotating by zero leaves its ancilla in |0>, so the top=1
  // post-selection discards exactly that branch (mirroring the closed form).
  const std::vector<double> sines = inversion_sines(cfg.n_accur, rotation_constant(cfg));
  std::vector<double> angles(sines.size());
  angles[0] = 0.0;
  for (std::size_t a = 1; a < sines.size(); ++a) angles[a] = 2.0 * std::asin(sines[a]);

  EngineOutput out;
  {
    // mass on the all-zeros accuracy bin just before the rotation
    const Vec acc = marginal_probabilities(s, layout.accuracy_qubits());
    out.zero_bin_mass = acc[0];
  }
  apply_multiplexed_rotation(s, layout.accuracy_qubits(), layout.top_qubits()[0], angles);
  out.postselect_top = project(s, layout.top_qubits(), 1);

  // uncompute the estimation register: exact adjoint of run_qpe_circuit
  const int m = layout.medium();
  const std::vector<int> medium = layout.medium_qubits();
  apply_qft(s, medium, /*inverse=*/false);
  const std::size_t bottom_dim = std::size_t{1} << layout.n_bottom;
  for (int k = m; k >= 1; --k) {
    const double t = -std::ldexp(1.0, m - k);
    apply_controlled_unitary(s, medium[k - 1],
                             embed_unitary(matrix_phase_unitary(sys.spectral, t), bottom_dim));
  }
  apply_hadamard_block(s, medium);
  out.postselect_medium = project(s, medium, 0);

  // surviving amplitudes: top=1, medium=0, bottom=q
  const std::size_t base = std::size_t{1} << (m + layout.n_bottom);
  const std::size_t n = sys.dimension;
  Vec sol(n);
  double imag_sq = 0.0;
  for (std::size_t q = 0; q < n; ++q) {
    sol[q] = s.amp[base + q].real();
    imag_sq += s.amp[base + q].imag() * s.amp[base + q].imag();
  }
  if (imag_sq > 1e-16)
    throw numerical_error("post-selected state has unexpected imaginary residue: " +
                          std::to_string(std::sqrt(imag_sq)));
  out.solution = normalized(sol);
  return out;
}

// Shot-resolved readout of the post-selected bottom register: magnitudes come
// from the histogram, signs from the exact amplitudes (the simulator stands in
// for the tomography step a hardware run would need).
Vec sampled_solution(const Vec& exact, std::uint64_t shots, std::uint64_t seed) {
  Vec weights(exact.size());
  for (std::size_t q = 0; q < exact.size(); ++q) weights[q] = exact[q] * exact[q];
  std::vector<double> cum(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cum.begin());
  const double total = cum.back();

  std::mt19937_64 rng(seed);
  std::vector<std::uint64_t> counts(exact.size(), 0);
  for (std::uint64_t t = 0; t < shots; ++t) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53 * total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t q = std::min<std::size_t>(it - cum.begin(), exact.size() - 1);
    ++counts[q];
  }

  Vec sol(exact.size());
  for (std::size_t q = 0; q < exact.size(); ++q) {
    const double mag = std::sqrt(static_cast<double>(counts[q]) / static_cast<double>(shots));
    sol[q] = std::copysign(mag, exact[q]);
  }
  return normalized(sol);
}

}  // namespace

Vec theoretical_solution(const SpectralDecomposition& sd, int n_accur) {
  if (n_accur < 1) throw validation_error("n_accur must be >= 1");
  if (sd.projections.size() != sd.eigenvalues.size())
    throw validation_error("spectral decomposition carries no projection coefficients");
  Vec coeff(sd.eigenvalues.size());
  for (std::size_t j = 0; j < coeff.size(); ++j) {
    const double truncated =
        std::ldexp(std::floor(std::ldexp(sd.eigenvalues[j], n_accur)), -n_accur);
    if (truncated <= 0.0)
      throw validation_error("eigenvalue " + std::to_string(j) +
                             " truncates to zero at " + std::to_string(n_accur) +
                             " bits; increase n_accur");
    coeff[j] = sd.projections[j] / truncated;
  }
  return normalized(sd.combine(coeff));
}

HhlResult solve_hhl(const ScaledDcSystem& sys, const HhlConfig& cfg) {
  validate_config(sys, cfg);

  const RegisterLayout layout{1, cfg.n_accur, cfg.n_redund, sys.n_bottom};
  bool use_circuit = false;
  switch (cfg.engine) {
    case Engine::circuit:
      layout.validate();  // throws resource_error when over the cap
      use_circuit = true;
      break;
    case Engine::fastpath:
      use_circuit = false;
      break;
    case Engine::automatic:
      use_circuit = layout.total() <= simulator_qubit_cap();
      break;
  }

  EngineOutput out = use_circuit ? run_circuit(sys, cfg) : run_fastpath(sys, cfg);

  HhlResult res;
  res.engine_used = use_circuit ? "circuit" : "fastpath";
  res.postselect_top = out.postselect_top;
  res.postselect_medium = out.postselect_medium;
  res.zero_bin_mass = out.zero_bin_mass;
  if (cfg.mode == RunMode::sampled) {
    res.normalized_solution = sampled_solution(out.solution, cfg.shots, cfg.seed);
    res.sampled_signs_from_exact = true;
  } else {
    res.normalized_solution = out.solution;
  }
  res.n_e_exp = relative_error(res.normalized_solution, sys.classical_normalized);
  res.n_e_theory = relative_error(theoretical_solution(sys.spectral, cfg.n_accur),
                                  sys.classical_normalized);
  return res;
}

}  // namespace qpf
