#pragma once

#include <cstdint>
#include <string>

#include "qpf/dcpf.hpp"
#include "qpf/linalg.hpp"

namespace qpf {

enum class RunMode { exact, sampled };

// circuit: full statevector simulation (validation reference, bounded by the
// qubit cap); fastpath: closed-form eigenbasis evaluation (default in sweeps);
// automatic: circuit when it fits under the cap, fastpath otherwise.
enum class Engine { automatic, circuit, fastpath };

struct HhlConfig {
  int n_accur = 0;
  int n_redund = 0;
  RunMode mode = RunMode::exact;
  std::uint64_t shots = 100000;
  std::uint64_t seed = 0;
  Engine engine = Engine::automatic;
  double rotation_c = 0.0;  // 0 picks the default 2^-n_accur
};

struct HhlResult {
  Vec normalized_solution;       // signed, unit norm
  double postselect_top = 0.0;     // P(top = |1>)
  double postselect_medium = 0.0;  // P(medium = |0...0> | top = |1>)
  double n_e_exp = 0.0;            // vs the classical normalized solution
  double n_e_theory = 0.0;         // truncation-only error at n_accur bits
  double zero_bin_mass = 0.0;      // rotation mass seen on the all-zeros eigenvalue bin
  std::string engine_used;         // "circuit" | "fastpath"
  bool sampled_signs_from_exact = false;  // sampled mode takes signs from exact amplitudes
};

// Full pipeline: QPE -> eigenvalue-keyed rotation -> post-select top=|1> ->
// inverse QPE -> post-select medium=|0...0> -> read the bottom register.
HhlResult solve_hhl(const ScaledDcSystem& sys, const HhlConfig& cfg);

// Normalized sum_j (p_j / lambda_tilde_j) u_j with lambda_tilde_j =
// floor(lambda_j 2^n_accur) 2^-n_accur; errors when some lambda_tilde_j = 0.
Vec theoretical_solution(const SpectralDecomposition& sd, int n_accur);

}  // namespace qpf
