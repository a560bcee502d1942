#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "qpf/dcpf.hpp"
#include "qpf/errors.hpp"
#include "qpf/hhl.hpp"

using namespace qpf;

namespace {
const ScaledDcSystem& five_bus() {
  static const ScaledDcSystem sys = scale_system(bundled_five_bus());
  return sys;
}
}  // namespace

TEST_CASE("truncation-only reference solution") {
  const ScaledDcSystem& sys = five_bus();
  Vec t9 = theoretical_solution(sys.spectral, 9);
  CHECK(std::abs(relative_error(t9, sys.classical_normalized) - 0.0128676) < 1e-6);
  // more accuracy bits, smaller truncation error
  double prev = 1.0;
  for (int na : {5, 7, 9, 11}) {
    const double err =
        relative_error(theoretical_solution(sys.spectral, na), sys.classical_normalized);
    CHECK(err < prev);
    prev = err;
  }
  // one bit floors three of the four eigenvalues to zero
  try {
    theoretical_solution(sys.spectral, 1);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::validation);
    CHECK(std::string(e.what()).find("truncates to zero") != std::string::npos);
  }
}

TEST_CASE("closed-form solve reproduces the frozen benchmark point") {
  HhlConfig cfg;
  cfg.n_accur = 9;
  cfg.n_redund = 7;
  cfg.engine = Engine::fastpath;
  HhlResult r = solve_hhl(five_bus(), cfg);
  CHECK(r.engine_used == "fastpath");
  const Vec want = {0.516746, 0.283817, 0.365205, 0.720449};
  REQUIRE(r.normalized_solution.size() == 4);
  for (std::size_t q = 0; q < 4; ++q)
    CHECK(std::abs(r.normalized_solution[q] - want[q]) < 1e-5);
  CHECK(std::abs(r.n_e_exp - 0.0128619) < 1e-6);
  CHECK(std::abs(r.n_e_theory - 0.0128676) < 1e-6);
  CHECK(r.postselect_top == doctest::Approx(2.63355e-4).epsilon(1e-4));
  CHECK(r.postselect_medium == doctest::Approx(0.999428).epsilon(1e-5));
  CHECK(r.zero_bin_mass >= 0.0);
  CHECK(r.zero_bin_mass < 1e-4);
  CHECK_FALSE(r.sampled_signs_from_exact);

  double n2 = 0.0;
  for (double v : r.normalized_solution) n2 += v * v;
  CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("circuit and closed-form engines agree") {
  HhlConfig a;
  a.n_accur = 5;
  a.n_redund = 3;
  a.engine = Engine::circuit;
  HhlConfig b = a;
  b.engine = Engine::fastpath;
  HhlResult ra = solve_hhl(five_bus(), a);
  HhlResult rb = solve_hhl(five_bus(), b);
  CHECK(ra.engine_used == "circuit");
  CHECK(rb.engine_used == "fastpath");
  for (std::size_t q = 0; q < 4; ++q)
    CHECK(ra.normalized_solution[q] == doctest::Approx(rb.normalized_solution[q]).epsilon(1e-10));
  CHECK(ra.postselect_top == doctest::Approx(rb.postselect_top).epsilon(1e-10));
  CHECK(ra.postselect_medium == doctest::Approx(rb.postselect_medium).epsilon(1e-10));
  CHECK(ra.zero_bin_mass == doctest::Approx(rb.zero_bin_mass).epsilon(1e-10));
}

TEST_CASE("engine selection respects the simulator cap") {
  HhlConfig small;
  small.n_accur = 9;
  small.n_redund = 7;  // 1 + 16 + 2 = 19 qubits: fits
  CHECK(solve_hhl(five_bus(), small).engine_used == "circuit");

  HhlConfig large;
  large.n_accur = 12;
  large.n_redund = 10;  // 1 + 22 + 2 = 25 qubits: over the default cap of 24
  CHECK(solve_hhl(five_bus(), large).engine_used == "fastpath");

  large.engine = Engine::circuit;
  try {
    solve_hhl(five_bus(), large);
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resource);
  }
}

TEST_CASE("sampled mode: deterministic, sign-tagged, converging") {
  HhlConfig cfg;
  cfg.n_accur = 6;
  cfg.n_redund = 4;
  cfg.engine = Engine::fastpath;
  HhlResult exact = solve_hhl(five_bus(), cfg);

  cfg.mode = RunMode::sampled;
  cfg.shots = 200000;
  cfg.seed = 31;
  HhlResult s1 = solve_hhl(five_bus(), cfg);
  HhlResult s2 = solve_hhl(five_bus(), cfg);
  CHECK(s1.normalized_solution == s2.normalized_solution);
  CHECK(s1.sampled_signs_from_exact);
  for (std::size_t q = 0; q < 4; ++q) {
    CHECK(std::abs(s1.normalized_solution[q] - exact.normalized_solution[q]) < 0.02);
    CHECK(std::signbit(s1.normalized_solution[q]) ==
          std::signbit(exact.normalized_solution[q]));
  }

  cfg.seed = 32;
  HhlResult s3 = solve_hhl(five_bus(), cfg);
  CHECK(s1.normalized_solution != s3.normalized_solution);

  cfg.shots = 0;
  CHECK_THROWS_AS(solve_hhl(five_bus(), cfg), Error);
}

TEST_CASE("rotation constant: default, rescaling invariance, rejection") {
  HhlConfig cfg;
  cfg.n_accur = 7;
  cfg.n_redund = 5;
  cfg.engine = Engine::fastpath;
  HhlResult def = solve_hhl(five_bus(), cfg);

  cfg.rotation_c = std::ldexp(1.0, -7);  // the default, spelled out
  HhlResult same = solve_hhl(five_bus(), cfg);
  CHECK(def.normalized_solution == same.normalized_solution);
  CHECK(def.postselect_top == same.postselect_top);

  cfg.rotation_c = std::ldexp(1.0, -8);  // half the constant
  HhlResult half = solve_hhl(five_bus(), cfg);
  // the constant cancels in the normalized state but scales P(top=1) by c^2
  for (std::size_t q = 0; q < 4; ++q)
    CHECK(half.normalized_solution[q] ==
          doctest::Approx(def.normalized_solution[q]).epsilon(1e-9));
  CHECK(half.postselect_top / def.postselect_top == doctest::Approx(0.25).epsilon(1e-9));

  cfg.rotation_c = std::ldexp(1.0, -6);  // exceeds 2^-n_accur
  CHECK_THROWS_AS(solve_hhl(five_bus(), cfg), Error);
  cfg.rotation_c = -0.1;
  CHECK_THROWS_AS(solve_hhl(five_bus(), cfg), Error);
}

TEST_CASE("configuration validation") {
  HhlConfig cfg;
  cfg.n_accur = 0;
  cfg.n_redund = 3;
  CHECK_THROWS_AS(solve_hhl(five_bus(), cfg), Error);
  cfg.n_accur = 5;
  cfg.n_redund = -1;
  CHECK_THROWS_AS(solve_hhl(five_bus(), cfg), Error);
}

TEST_CASE("redundancy qubits pin the solve to the truncation ideal") {
  // The rotation inverts only the accuracy-bit prefix, so redundancy does not
  // refine the inversion grid: it concentrates the estimator on the floor
  // prefix. With redundancy the realised error therefore converges to the
  // ideal-truncation prediction; without it the estimate wobbles across
  // neighbouring prefixes and the realised error drifts off that prediction
  // (here the wobble happens to cancel part of the floor bias).
  HhlConfig cfg;
  cfg.n_accur = 9;
  cfg.engine = Engine::fastpath;
  cfg.n_redund = 0;
  const HhlResult loose = solve_hhl(five_bus(), cfg);
  cfg.n_redund = 7;
  const HhlResult sharp = solve_hhl(five_bus(), cfg);
  const double sharp_gap = std::abs(sharp.n_e_exp - sharp.n_e_theory);
  const double loose_gap = std::abs(loose.n_e_exp - loose.n_e_theory);
  CHECK(sharp_gap < 5e-4);
  CHECK(loose_gap > 50.0 * sharp_gap);
  // with enough redundancy the observed error approaches the truncation theory
  CHECK(std::abs(sharp.n_e_exp - 0.0128676) < 5e-4);
}
