#include "qpf/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>

#include "qpf/errors.hpp"

namespace qpf {

namespace {

// Global qubit index g (0 = MSB) -> bit position in the amplitude index.
inline int bitpos(const RegisterLayout& l, int g) { return l.total() - 1 - g; }

void check_qubit(const RegisterLayout& l, int g) {
  if (g < 0 || g >= l.total())
    throw validation_error("qubit index " + std::to_string(g) + " out of range for " +
                           std::to_string(l.total()) + " qubits");
}

std::uint64_t gather_bits(std::uint64_t idx, const std::vector<int>& positions) {
  // positions listed most-significant first
  std::uint64_t v = 0;
  for (int p : positions) v = (v << 1) | ((idx >> p) & 1ull);
  return v;
}

}  // namespace

int simulator_qubit_cap() {
  if (const char* env = std::getenv("QPF_MAX_QUBITS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 30) return static_cast<int>(v);
    throw validation_error("QPF_MAX_QUBITS must be an integer in [1, 30]");
  }
  return 24;
}

std::vector<int> RegisterLayout::top_qubits() const {
  std::vector<int> q;
  for (int i = 0; i < n_top; ++i) q.push_back(i);
  return q;
}
std::vector<int> RegisterLayout::medium_qubits() const {
  std::vector<int> q;
  for (int i = 0; i < medium(); ++i) q.push_back(n_top + i);
  return q;
}
std::vector<int> RegisterLayout::accuracy_qubits() const {
  std::vector<int> q;
  for (int i = 0; i < n_accur; ++i) q.push_back(n_top + i);
  return q;
}
std::vector<int> RegisterLayout::bottom_qubits() const {
  std::vector<int> q;
  for (int i = 0; i < n_bottom; ++i) q.push_back(n_top + medium() + i);
  return q;
}

void RegisterLayout::validate() const {
  if (n_top < 0 || n_top > 1) throw validation_error("top register must hold 0 or 1 qubits");
  if (n_accur < 0 || n_redund < 0 || n_bottom < 0) throw validation_error("negative qubit count");
  if (total() < 1) throw validation_error("empty register layout");
  int cap = simulator_qubit_cap();
  if (total() > cap)
    throw resource_error("layout needs " + std::to_string(total()) + " qubits, above the simulator cap of " +
                         std::to_string(cap) + " (set QPF_MAX_QUBITS to raise it)");
}

double StateVector::norm_sq() const {
  double s = 0.0;
  for (const auto& a : amp) s += std::norm(a);
  return s;
}

StateVector init_with_amplitudes(const RegisterLayout& layout, const Vec& bottom_values) {
  layout.validate();
  const std::size_t dim = 1ull << layout.n_bottom;
  if (bottom_values.size() > dim)
    throw validation_error("bottom amplitude vector longer than 2^n_bottom");
  double n2 = 0.0;
  for (double v : bottom_values) n2 += v * v;
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-10)
    throw validation_error("bottom amplitudes are not normalized: norm " + std::to_string(std::sqrt(n2)));
  StateVector s;
  s.layout = layout;
  s.amp.assign(1ull << layout.total(), 0.0);
  // top=0, medium=0...0 places the bottom block at the lowest indices
  for (std::size_t b = 0; b < bottom_values.size(); ++b) s.amp[b] = bottom_values[b];
  return s;
}

void apply_hadamard(StateVector& s, int qubit) {
  check_qubit(s.layout, qubit);
  const std::uint64_t mask = 1ull << bitpos(s.layout, qubit);
  const double inv = 1.0 / std::numbers::sqrt2;
  const std::uint64_t size = s.amp.size();
  for (std::uint64_t i = 0; i < size; ++i) {
    if (i & mask) continue;
    auto a0 = s.amp[i], a1 = s.amp[i | mask];
    s.amp[i] = inv * (a0 + a1);
    s.amp[i | mask] = inv * (a0 - a1);
  }
}

void apply_hadamard_block(StateVector& s, const std::vector<int>& qubits) {
  for (int q : qubits) apply_hadamard(s, q);
}

void apply_controlled_unitary(StateVector& s, int control, const CMat& u) {
  check_qubit(s.layout, control);
  const std::size_t dim = 1ull << s.layout.n_bottom;
  if (u.size() != dim) throw validation_error("unitary dimension does not match the bottom register");
  double residual = 0.0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      std::complex<double> e = 0.0;
      for (std::size_t k = 0; k < dim; ++k) e += std::conj(u[k][i]) * u[k][j];
      residual = std::max(residual, std::abs(e - (i == j ? 1.0 : 0.0)));
    }
  if (residual > 1e-10) throw validation_error("matrix is not unitary (residual " + std::to_string(residual) + ")");

  const std::uint64_t cmask = 1ull << bitpos(s.layout, control);
  const std::uint64_t size = s.amp.size();
  std::vector<std::complex<double>> scratch(dim);
  // bottom occupies the least significant bits, so each block is contiguous
  for (std::uint64_t base = 0; base < size; base += dim) {
    if (!(base & cmask)) continue;
    for (std::size_t r = 0; r < dim; ++r) {
      std::complex<double> acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) acc += u[r][c] * s.amp[base + c];
      scratch[r] = acc;
    }
    for (std::size_t r = 0; r < dim; ++r) s.amp[base + r] = scratch[r];
  }
}

void apply_phase(StateVector& s, int qubit, double phi) {
  check_qubit(s.layout, qubit);
  const std::uint64_t mask = 1ull << bitpos(s.layout, qubit);
  const std::complex<double> ph(std::cos(phi), std::sin(phi));
  for (std::uint64_t i = 0; i < s.amp.size(); ++i)
    if (i & mask) s.amp[i] *= ph;
}

void apply_controlled_phase(StateVector& s, int control, int target, double phi) {
  check_qubit(s.layout, control);
  check_qubit(s.layout, target);
  if (control == target) throw validation_error("control equals target");
  const std::uint64_t m = (1ull << bitpos(s.layout, control)) | (1ull << bitpos(s.layout, target));
  const std::complex<double> ph(std::cos(phi), std::sin(phi));
  for (std::uint64_t i = 0; i < s.amp.size(); ++i)
    if ((i & m) == m) s.amp[i] *= ph;
}

void apply_swap(StateVector& s, int a, int b) {
  check_qubit(s.layout, a);
  check_qubit(s.layout, b);
  if (a == b) return;
  const std::uint64_t ma = 1ull << bitpos(s.layout, a);
  const std::uint64_t mb = 1ull << bitpos(s.layout, b);
  for (std::uint64_t i = 0; i < s.amp.size(); ++i)
    if ((i & ma) && !(i & mb)) std::swap(s.amp[i], s.amp[(i & ~ma) | mb]);
}

void apply_qft(StateVector& s, const std::vector<int>& qubits, bool inverse) {
  const int m = static_cast<int>(qubits.size());
  for (std::size_t i = 0; i < qubits.size(); ++i)
    for (std::size_t j = i + 1; j < qubits.size(); ++j)
      if (qubits[i] == qubits[j]) throw validation_error("duplicate qubit in QFT list");
  const double sign = inverse ? -1.0 : 1.0;
  if (!inverse) {
    // textbook circuit: H + controlled phases from less significant qubits,
    // then reverse the qubit order
    for (int i = 0; i < m; ++i) {
      apply_hadamard(s, qubits[i]);
      for (int j = i + 1; j < m; ++j)
        apply_controlled_phase(s, qubits[j], qubits[i], sign * std::numbers::pi / double(1ull << (j - i)));
    }
    for (int i = 0; i < m / 2; ++i) apply_swap(s, qubits[i], qubits[m - 1 - i]);
  } else {
    for (int i = 0; i < m / 2; ++i) apply_swap(s, qubits[i], qubits[m - 1 - i]);
    for (int i = m - 1; i >= 0; --i) {
      for (int j = m - 1; j > i; --j)
        apply_controlled_phase(s, qubits[j], qubits[i], sign * std::numbers::pi / double(1ull << (j - i)));
      apply_hadamard(s, qubits[i]);
    }
  }
}

void apply_inverse_qft(StateVector& s, const std::vector<int>& qubits) { apply_qft(s, qubits, true); }

void apply_multiplexed_rotation(StateVector& s, const std::vector<int>& controls, int target,
                                const Vec& angles) {
  check_qubit(s.layout, target);
  std::vector<int> positions;
  for (int q : controls) {
    check_qubit(s.layout, q);
    if (q == target) throw validation_error("rotation target among controls");
    positions.push_back(bitpos(s.layout, q));
  }
  if (angles.size() != (1ull << controls.size()))
    throw validation_error("angle table size must be 2^#controls");

  // precompute cos/sin of half-angles; NaN marks a missing entry
  Vec c(angles.size()), sn(angles.size());
  for (std::size_t v = 0; v < angles.size(); ++v) {
    c[v] = std::cos(angles[v] / 2.0);
    sn[v] = std::sin(angles[v] / 2.0);
  }
  const std::uint64_t tmask = 1ull << bitpos(s.layout, target);
  for (std::uint64_t i = 0; i < s.amp.size(); ++i) {
    if (i & tmask) continue;
    const std::uint64_t j = i | tmask;
    if (s.amp[i] == 0.0 && s.amp[j] == 0.0) continue;
    const std::uint64_t v = gather_bits(i, positions);
    if (std::isnan(angles[v]))
      throw numerical_error("no rotation angle for accuracy value " + std::to_string(v) +
                            " (degenerate all-zeros eigenvalue bin reached with nonzero amplitude)");
    const auto a0 = s.amp[i], a1 = s.amp[j];
    s.amp[i] = c[v] * a0 - sn[v] * a1;
    s.amp[j] = sn[v] * a0 + c[v] * a1;
  }
}

Vec marginal_probabilities(const StateVector& s, const std::vector<int>& qubits) {
  std::vector<int> positions;
  for (int q : qubits) {
    check_qubit(s.layout, q);
    positions.push_back(bitpos(s.layout, q));
  }
  Vec probs(1ull << qubits.size(), 0.0);
  for (std::uint64_t i = 0; i < s.amp.size(); ++i) {
    double w = std::norm(s.amp[i]);
    if (w != 0.0) probs[gather_bits(i, positions)] += w;
  }
  return probs;
}

double project(StateVector& s, const std::vector<int>& qubits, std::uint64_t outcome) {
  std::vector<int> positions;
  for (int q : qubits) {
    check_qubit(s.layout, q);
    positions.push_back(bitpos(s.layout, q));
  }
  if (outcome >= (1ull << qubits.size())) throw validation_error("projection outcome out of range");
  double p = 0.0;
  for (std::uint64_t i = 0; i < s.amp.size(); ++i)
    if (gather_bits(i, positions) == outcome) p += std::norm(s.amp[i]);
  if (p <= 1e-15)
    throw numerical_error("projection onto an outcome of probability " + std::to_string(p));
  const double inv = 1.0 / std::sqrt(p);
  for (std::uint64_t i = 0; i < s.amp.size(); ++i) {
    if (gather_bits(i, positions) == outcome)
      s.amp[i] *= inv;
    else
      s.amp[i] = 0.0;
  }
  return p;
}

std::map<std::uint64_t, std::uint64_t> sample(const StateVector& s, const std::vector<int>& qubits,
                                              std::uint64_t shots, std::uint64_t seed) {
  if (shots < 1) throw validation_error("shots must be >= 1");
  Vec probs = marginal_probabilities(s, qubits);
  Vec cum(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cum[i] = acc;
  }
  std::mt19937_64 rng(seed);
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t t = 0; t < shots; ++t) {
    double u = double(rng() >> 11) * 0x1.0p-53 * acc;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    std::uint64_t v = std::min<std::uint64_t>(it - cum.begin(), probs.size() - 1);
    ++hist[v];
  }
  return hist;
}

}  // namespace qpf
