#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>

#include "qpf/dcpf.hpp"
#include "qpf/errors.hpp"
#include "qpf/qpe.hpp"
#include "qpf/statevector.hpp"

using namespace qpf;
using cplx = std::complex<double>;

namespace {

// brute-force kernel: (1/M) sum_x e^{2 pi i x (phi - v/M)}
cplx direct_amplitude(double phase, int m, std::uint64_t v) {
  const double M = std::ldexp(1.0, m);
  cplx s = 0.0;
  for (std::uint64_t x = 0; x < std::uint64_t(M); ++x) {
    const double ang = 2.0 * std::numbers::pi * double(x) * (phase - double(v) / M);
    s += cplx(std::cos(ang), std::sin(ang));
  }
  return s / M;
}

}  // namespace

TEST_CASE("on-grid phases give a point mass") {
  CHECK(std::abs(qpe_amplitude(3.0 / 8.0, 3, 3) - cplx(1.0)) < 1e-15);
  CHECK(std::abs(qpe_amplitude(3.0 / 8.0, 3, 2)) < 1e-15);
  Vec d = qpe_conditional(5.0 / 16.0, 4);
  CHECK(d[5] == doctest::Approx(1.0));
  for (std::size_t v = 0; v < d.size(); ++v)
    if (v != 5) CHECK(d[v] == 0.0);
}

TEST_CASE("kernel matches the brute-force sum off the grid") {
  for (double phase : {0.3, 0.123456, 0.9376}) {
    for (std::uint64_t v = 0; v < 8; ++v) {
      const cplx want = direct_amplitude(phase, 3, v);
      CHECK(std::abs(qpe_amplitude(phase, 3, v) - want) < 1e-12);
    }
  }
}

TEST_CASE("conditional distribution sums to one and peaks at the nearest bin") {
  for (double phase : {0.071, 0.3333, 0.52, 0.999}) {
    Vec d = qpe_conditional(phase, 6);
    double total = 0.0;
    std::size_t best = 0;
    for (std::size_t v = 0; v < d.size(); ++v) {
      total += d[v];
      if (d[v] > d[best]) best = v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // circular distance from the peak to phase*64 is at most one grid step
    const double diff = std::abs(double(best) - phase * 64.0);
    CHECK(std::min(diff, 64.0 - diff) <= 1.0);
  }
}

TEST_CASE("phases outside (0,1) are rejected") {
  CHECK_THROWS_AS(qpe_conditional(0.0, 3), Error);
  CHECK_THROWS_AS(qpe_conditional(1.0, 3), Error);
  CHECK_THROWS_AS(qpe_conditional(-0.2, 3), Error);
}

TEST_CASE("closed-form register distribution mixes the branch conditionals") {
  const ScaledDcSystem sys = scale_system(bundled_five_bus());
  QpeOutcome out = fast_path_distribution(sys.spectral, 9);
  REQUIRE(out.per_eigenvalue.size() == 4);
  double total = 0.0;
  for (double p : out.distribution) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  for (std::size_t j = 0; j < 4; ++j) {
    Vec want = qpe_conditional(sys.spectral.eigenvalues[j], 9);
    for (std::size_t v = 0; v < want.size(); ++v)
      CHECK(out.per_eigenvalue[j][v] == doctest::Approx(want[v]).epsilon(1e-12));
  }
  // reconstruct the mixture
  for (std::size_t v = 0; v < out.distribution.size(); ++v) {
    double mix = 0.0;
    for (std::size_t j = 0; j < 4; ++j)
      mix += sys.spectral.projections[j] * sys.spectral.projections[j] * out.per_eigenvalue[j][v];
    CHECK(out.distribution[v] == doctest::Approx(mix).epsilon(1e-12));
  }
  // mass concentrates around the scaled eigenvalues (the smallest one rounds
  // up, so its mass straddles bins 22 and 23)
  CHECK(out.distribution[368] > 0.1);
  CHECK(out.distribution[219] > 0.1);
  CHECK(out.distribution[59] > 0.05);
  CHECK(out.distribution[22] + out.distribution[23] > 0.05);
}

TEST_CASE("full-circuit estimation matches the closed form") {
  const ScaledDcSystem sys = scale_system(bundled_five_bus());
  for (int m : {4, 6, 8}) {
    StateVector s = init_with_amplitudes(RegisterLayout{0, m, 0, sys.n_bottom}, sys.p);
    run_qpe_circuit(s, sys.spectral);
    Vec got = marginal_probabilities(s, s.layout.medium_qubits());
    QpeOutcome want = fast_path_distribution(sys.spectral, m);
    double tv = 0.0;
    for (std::size_t v = 0; v < got.size(); ++v) tv += std::abs(got[v] - want.distribution[v]);
    CHECK(tv / 2.0 < 1e-12);
  }
}

TEST_CASE("circuit estimation pads systems narrower than the bottom register") {
  // a 3-dimensional system needs a 2-qubit bottom register; the spectral
  // unitary acts as the identity on the unused basis state
  DcSystem d;
  d.b = SymMatrix(3, {2.0, -0.4, 0.1, -0.4, 1.5, -0.3, 0.1, -0.3, 1.1});
  d.p = {0.3, -0.5, 0.7};
  d.bus_order = {1, 2, 3};
  const ScaledDcSystem sys = scale_system(d);
  REQUIRE(sys.n_bottom == 2);
  for (int m : {3, 5}) {
    StateVector s = init_with_amplitudes(RegisterLayout{0, m, 0, sys.n_bottom}, sys.p);
    run_qpe_circuit(s, sys.spectral);
    Vec got = marginal_probabilities(s, s.layout.medium_qubits());
    QpeOutcome want = fast_path_distribution(sys.spectral, m);
    double tv = 0.0;
    for (std::size_t v = 0; v < got.size(); ++v) tv += std::abs(got[v] - want.distribution[v]);
    CHECK(tv / 2.0 < 1e-12);
  }
}

TEST_CASE("circuit estimation demands a cleared medium register") {
  const ScaledDcSystem sys = scale_system(bundled_five_bus());
  StateVector s = init_with_amplitudes(RegisterLayout{0, 3, 0, 2}, sys.p);
  apply_hadamard(s, s.layout.medium_qubits()[0]);
  CHECK_THROWS_AS(run_qpe_circuit(s, sys.spectral), Error);
}

TEST_CASE("single-estimation failure bound") {
  CHECK(failure_bound_single(2) == doctest::Approx(0.25));
  CHECK(failure_bound_single(7) == doctest::Approx(1.0 / 252.0).epsilon(1e-14));
  CHECK(failure_bound_single(9) == doctest::Approx(1.0 / 1020.0).epsilon(1e-14));
  CHECK_THROWS_AS(failure_bound_single(1), Error);
}

TEST_CASE("multi-module success bound compounds per module") {
  // one module: 9 bits in a single estimate
  CHECK(success_bound_multi(9, 9, 7) == doctest::Approx(1.0 - 1.0 / 252.0).epsilon(1e-14));
  // nine single-bit modules
  const double eps = 1.0 / 252.0;
  CHECK(success_bound_multi(9, 1, 7) == doctest::Approx(std::pow(1.0 - eps, 9)).epsilon(1e-14));
  // ceil(9/4) = 3 modules
  CHECK(success_bound_multi(9, 4, 7) == doctest::Approx(std::pow(1.0 - eps, 3)).epsilon(1e-14));
  CHECK_THROWS_AS(success_bound_multi(0, 1, 7), Error);
  CHECK_THROWS_AS(success_bound_multi(9, 0, 7), Error);
  CHECK_THROWS_AS(success_bound_multi(9, 1, 1), Error);
}

TEST_CASE("success surface covers the inclusive grid") {
  auto cells = success_surface(9, 1, 3, 2, 4);
  REQUIRE(cells.size() == 9);
  CHECK(cells.front().n_accur == 1);
  CHECK(cells.front().n_redund == 2);
  CHECK(cells.back().n_accur == 3);
  CHECK(cells.back().n_redund == 4);
  for (const auto& c : cells) {
    CHECK(c.n_module == (9 + c.n_accur - 1) / c.n_accur);
    CHECK(c.p_success == doctest::Approx(success_bound_multi(9, c.n_accur, c.n_redund)));
  }
  CHECK_THROWS_AS(success_surface(9, 3, 1, 2, 4), Error);
}
