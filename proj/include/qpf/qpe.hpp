#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qpf/linalg.hpp"
#include "qpf/statevector.hpp"

namespace qpf {

// Closed-form phase-estimation kernel for an m-bit register reading a phase
// in [0,1): amplitude of outcome v is
//   c_v(phi) = (1/M) sum_{x<M} e^{2 pi i x (phi - v/M)},   M = 2^m,
// which collapses to e^{i pi (M-1) d} sin(pi M d) / (M sin(pi d)), d = phi - v/M.
std::complex<double> qpe_amplitude(double phase, int m, std::uint64_t v);

// |c_v(phi)|^2 for all v; exact point mass when phi is representable in m bits.
Vec qpe_conditional(double phase, int m);

struct QpeOutcome {
  Vec distribution;                 // size 2^m, sums to 1
  std::vector<Vec> per_eigenvalue;  // conditional distribution per branch j
};

// O(N * 2^m) closed-form outcome of one QPE on the register state
// sum_j p_j |u_j>: distribution = sum_j p_j^2 * conditional_j. Requires
// projections present with sum_j p_j^2 = 1 and all eigenvalues in (0,1).
QpeOutcome fast_path_distribution(const SpectralDecomposition& sd, int m);

// Full-circuit QPE on the medium register: Hadamard block, controlled powers
// U^{2^(m-k)} with U = e^{2 pi i B t_scale} (k-th medium qubit controls the
// 2^(m-k) power), then inverse QFT. Medium must start in |0...0>.
void run_qpe_circuit(StateVector& s, const SpectralDecomposition& sd, double time_scale = 1.0);

// epsilon <= (2 (2^n_redund - 2))^-1, the single-module failure bound.
double failure_bound_single(int n_redund);

// (1 - failure_bound_single(n_redund))^ceil(m_prec/n_accur).
double success_bound_multi(int m_prec, int n_accur, int n_redund);

struct SuccessCell {
  int n_accur;
  int n_redund;
  int n_module;
  double p_success;
};

// Grid of success_bound_multi over inclusive ranges.
std::vector<SuccessCell> success_surface(int m_prec, int accur_lo, int accur_hi, int redund_lo,
                                         int redund_hi);

}  // namespace qpf
