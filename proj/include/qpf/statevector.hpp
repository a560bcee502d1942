#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <vector>

#include "qpf/linalg.hpp"

namespace qpf {

// Simulator-wide qubit budget. QPF_MAX_QUBITS in the environment overrides
// the default of 24 (2^24 complex doubles = 256 MB).
int simulator_qubit_cap();

// Register partition, listed most-significant first: top | medium | bottom,
// where medium = accuracy qubits followed by redundant qubits.
//
// Bit convention (used everywhere): within a register, qubit index 0 is the
// MOST significant bit of that register's basis value, and the registers
// concatenate top|medium|bottom into the global amplitude index.
struct RegisterLayout {
  int n_top = 0;     // 0 or 1
  int n_accur = 0;   // >= 1 when a medium register exists
  int n_redund = 0;  // >= 0
  int n_bottom = 0;  // ceil(log2 N) for system dimension N

  int medium() const { return n_accur + n_redund; }
  int total() const { return n_top + n_accur + n_redund + n_bottom; }

  // Global qubit indices (0 = global MSB).
  std::vector<int> top_qubits() const;
  std::vector<int> medium_qubits() const;
  std::vector<int> accuracy_qubits() const;
  std::vector<int> bottom_qubits() const;

  void validate() const;  // throws when counts are inconsistent or above the cap
};

struct StateVector {
  RegisterLayout layout;
  std::vector<std::complex<double>> amp;  // size 2^layout.total()

  double norm_sq() const;
};

// |0>_top (x) |0...0>_medium (x) |bottom_values> ; bottom_values must be unit
// norm (1e-10) and is zero-padded to 2^n_bottom.
StateVector init_with_amplitudes(const RegisterLayout& layout, const Vec& bottom_values);

void apply_hadamard(StateVector& s, int qubit);
void apply_hadamard_block(StateVector& s, const std::vector<int>& qubits);

// u acts on the bottom register (dimension 2^n_bottom), applied to amplitudes
// whose control qubit is 1.
void apply_controlled_unitary(StateVector& s, int control, const CMat& u);

// diag(1, e^{i*phi}) on one qubit, optionally controlled.
void apply_phase(StateVector& s, int qubit, double phi);
void apply_controlled_phase(StateVector& s, int control, int target, double phi);
void apply_swap(StateVector& s, int a, int b);

// QFT on the listed qubits (most-significant first): |x> -> sum_y
// exp(+2*pi*i*x*y/2^m) |y> / sqrt(2^m); inverse=true applies the adjoint.
void apply_qft(StateVector& s, const std::vector<int>& qubits, bool inverse);
void apply_inverse_qft(StateVector& s, const std::vector<int>& qubits);

// R_y(angle_of[v]) on `target` for each accuracy basis value v. angles has
// size 2^(#controls); a NaN entry reached with nonzero amplitude is an error
// (the degenerate all-zeros eigenvalue bin must be given an explicit angle).
void apply_multiplexed_rotation(StateVector& s, const std::vector<int>& controls, int target,
                                const Vec& angles);

// Probability of each basis value of the listed qubits (most-significant
// first), marginalized over the rest. Dense vector of size 2^k.
Vec marginal_probabilities(const StateVector& s, const std::vector<int>& qubits);

// Projects the listed qubits onto `outcome`, renormalizes, and returns the
// pre-projection probability. Throws on (near-)zero-probability outcomes.
double project(StateVector& s, const std::vector<int>& qubits, std::uint64_t outcome);

// Deterministic seeded sampling from marginal_probabilities (mt19937_64;
// uniform doubles via (x >> 11) * 2^-53, inversion on the cumulative sums).
std::map<std::uint64_t, std::uint64_t> sample(const StateVector& s, const std::vector<int>& qubits,
                                              std::uint64_t shots, std::uint64_t seed);

}  // namespace qpf
