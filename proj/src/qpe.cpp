#include "qpf/qpe.hpp"

#include <cmath>

#include "qpf/errors.hpp"

namespace qpf {

std::complex<double> qpe_amplitude(double phase, int m, std::uint64_t v) {
  const double M = std::ldexp(1.0, m);
  const double t = std::ldexp(phase, m);  // exact power-of-two scaling
  const double frac = t - std::floor(t);
  if (frac == 0.0) {
    std::uint64_t hit = static_cast<std::uint64_t>(std::fmod(t, M));
    return v == hit ? 1.0 : 0.0;
  }
  const double d = phase - double(v) / M;
  // sin(pi M d) = (-1)^v sin(pi t) and e^{i pi (M-1) d} = (-1)^v e^{i pi t} e^{-i pi d},
  // so the (-1)^v factors cancel:
  const std::complex<double> ph =
      std::complex<double>(cospi(t), sinpi(t)) * std::complex<double>(cospi(-d), sinpi(-d));
  return ph * (sinpi(t) / (M * sinpi(d)));
}

Vec qpe_conditional(double phase, int m) {
  if (!(phase > 0.0 && phase < 1.0)) throw validation_error("phase must lie strictly in (0,1): rescaling required");
  const std::uint64_t M = 1ull << m;
  Vec out(M, 0.0);
  const double t = std::ldexp(phase, m);
  const double frac = t - std::floor(t);
  if (frac == 0.0) {
    out[static_cast<std::uint64_t>(t) & (M - 1)] = 1.0;
    return out;
  }
  const double num = sinpi(frac) * sinpi(frac) / (double(M) * double(M));
  const double invM = 1.0 / double(M);
  for (std::uint64_t v = 0; v < M; ++v) {
    const double s = sinpi(phase - double(v) * invM);
    out[v] = num / (s * s);
  }
  return out;
}

QpeOutcome fast_path_distribution(const SpectralDecomposition& sd, int m) {
  if (sd.projections.empty()) throw validation_error("spectral decomposition lacks projections");
  QpeOutcome outcome;
  outcome.distribution.assign(1ull << m, 0.0);
  outcome.per_eigenvalue.reserve(sd.dim());
  for (std::size_t j = 0; j < sd.dim(); ++j) {
    Vec cond = qpe_conditional(sd.eigenvalues[j], m);
    const double w = sd.projections[j] * sd.projections[j];
    for (std::size_t v = 0; v < cond.size(); ++v) outcome.distribution[v] += w * cond[v];
    outcome.per_eigenvalue.push_back(std::move(cond));
  }
  return outcome;
}

void run_qpe_circuit(StateVector& s, const SpectralDecomposition& sd, double time_scale) {
  const auto medium = s.layout.medium_qubits();
  const int m = static_cast<int>(medium.size());
  if (m == 0) throw validation_error("QPE requires a nonempty medium register");
  {
    Vec med = marginal_probabilities(s, medium);
    if (std::abs(med[0] - 1.0) > 1e-10)
      throw validation_error("medium register must start in |0...0>");
  }
  apply_hadamard_block(s, medium);
  const std::size_t bottom_dim = std::size_t{1} << s.layout.n_bottom;
  for (int k = 1; k <= m; ++k) {
    CMat u = matrix_phase_unitary(sd, time_scale * std::ldexp(1.0, m - k));
    apply_controlled_unitary(s, medium[k - 1], embed_unitary(u, bottom_dim));
  }
  apply_inverse_qft(s, medium);
}

double failure_bound_single(int n_redund) {
  if (n_redund < 2) throw validation_error("failure bound needs n_redund >= 2 (nonpositive denominator)");
  return 1.0 / (2.0 * (std::ldexp(1.0, n_redund) - 2.0));
}

double success_bound_multi(int m_prec, int n_accur, int n_redund) {
  if (n_accur < 1) throw validation_error("n_accur must be >= 1");
  if (m_prec < 1) throw validation_error("m_prec must be >= 1");
  const int modules = (m_prec + n_accur - 1) / n_accur;
  return std::pow(1.0 - failure_bound_single(n_redund), modules);
}

std::vector<SuccessCell> success_surface(int m_prec, int accur_lo, int accur_hi, int redund_lo,
                                         int redund_hi) {
  if (accur_lo > accur_hi || redund_lo > redund_hi) throw validation_error("empty surface range");
  std::vector<SuccessCell> cells;
  for (int na = accur_lo; na <= accur_hi; ++na)
    for (int nr = redund_lo; nr <= redund_hi; ++nr)
      cells.push_back({na, nr, (m_prec + na - 1) / na, success_bound_multi(m_prec, na, nr)});
  return cells;
}

}  // namespace qpf
