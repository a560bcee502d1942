#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "qpf/errors.hpp"
#include "qpf/statevector.hpp"

using namespace qpf;
using cplx = std::complex<double>;

namespace {

StateVector random_state(const RegisterLayout& layout, unsigned seed) {
  StateVector s;
  s.layout = layout;
  s.amp.resize(1ull << layout.total());
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  double n2 = 0.0;
  for (auto& a : s.amp) {
    a = cplx(dist(rng), dist(rng));
    n2 += std::norm(a);
  }
  for (auto& a : s.amp) a /= std::sqrt(n2);
  return s;
}

}  // namespace

TEST_CASE("register layout bookkeeping and validation") {
  RegisterLayout l{1, 3, 2, 2};
  CHECK(l.medium() == 5);
  CHECK(l.total() == 8);
  CHECK(l.top_qubits() == std::vector<int>{0});
  CHECK(l.medium_qubits() == std::vector<int>{1, 2, 3, 4, 5});
  CHECK(l.accuracy_qubits() == std::vector<int>{1, 2, 3});
  CHECK(l.bottom_qubits() == std::vector<int>{6, 7});
  CHECK_NOTHROW(l.validate());

  RegisterLayout bad{1, -1, 0, 2};
  CHECK_THROWS_AS(bad.validate(), Error);

  RegisterLayout huge{1, 30, 10, 2};
  try {
    huge.validate();
    FAIL("expected a resource error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::resource);
  }
}

TEST_CASE("default simulator cap") { CHECK(simulator_qubit_cap() == 24); }

TEST_CASE("initialization places the bottom amplitudes at medium=0, top=0") {
  RegisterLayout l{1, 2, 0, 2};
  StateVector s = init_with_amplitudes(l, {0.6, 0.0, 0.8, 0.0});
  CHECK(s.amp.size() == 32);
  CHECK(s.amp[0] == cplx(0.6));
  CHECK(s.amp[2] == cplx(0.8));
  CHECK(s.norm_sq() == doctest::Approx(1.0));
  // short vectors are zero-padded
  StateVector t = init_with_amplitudes(l, {1.0, 0.0, 0.0});
  CHECK(t.amp[0] == cplx(1.0));
  // non-unit input is rejected
  CHECK_THROWS_AS(init_with_amplitudes(l, {0.5, 0.5}), Error);
  CHECK_THROWS_AS(init_with_amplitudes(l, {1.0, 1.0, 0.0, 0.0, 0.0}), Error);
}

TEST_CASE("hadamard produces the uniform split and is an involution") {
  RegisterLayout l{0, 1, 0, 1};
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard(s, 0);
  const double r = std::sqrt(0.5);
  CHECK(std::abs(s.amp[0] - cplx(r)) < 1e-15);
  CHECK(std::abs(s.amp[2] - cplx(r)) < 1e-15);
  apply_hadamard(s, 0);
  CHECK(std::abs(s.amp[0] - cplx(1.0)) < 1e-14);
  CHECK(std::abs(s.amp[2]) < 1e-14);

  StateVector u = init_with_amplitudes(RegisterLayout{0, 3, 0, 1}, {1.0, 0.0});
  apply_hadamard_block(u, u.layout.medium_qubits());
  for (std::uint64_t v = 0; v < 8; ++v)
    CHECK(std::abs(u.amp[v << 1] - cplx(std::sqrt(0.125))) < 1e-14);
}

TEST_CASE("controlled unitary acts on the bottom register only when control is 1") {
  RegisterLayout l{1, 1, 0, 1};
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  CMat x = {{cplx(0.0), cplx(1.0)}, {cplx(1.0), cplx(0.0)}};
  const int top = l.top_qubits()[0];
  apply_controlled_unitary(s, top, x);  // control is |0>: nothing happens
  CHECK(std::abs(s.amp[0] - cplx(1.0)) < 1e-15);

  apply_hadamard(s, top);
  apply_controlled_unitary(s, top, x);  // entangles: (|0,0> + |1,1>)/sqrt(2)
  const double r = std::sqrt(0.5);
  CHECK(std::abs(s.amp[0b000] - cplx(r)) < 1e-15);
  CHECK(std::abs(s.amp[0b101] - cplx(r)) < 1e-15);
  CHECK(std::abs(s.amp[0b100]) < 1e-15);
}

TEST_CASE("phase, controlled phase, and swap") {
  RegisterLayout l{0, 2, 0, 1};
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard_block(s, s.layout.medium_qubits());
  apply_phase(s, 0, std::numbers::pi / 2);  // qubit 0 = medium MSB
  CHECK(std::abs(s.amp[0b10 << 1] - cplx(0.0, 0.5)) < 1e-14);
  CHECK(std::abs(s.amp[0b000] - cplx(0.5)) < 1e-14);

  StateVector t = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard_block(t, t.layout.medium_qubits());
  apply_controlled_phase(t, 0, 1, std::numbers::pi);
  CHECK(std::abs(t.amp[0b11 << 1] - cplx(-0.5)) < 1e-14);
  CHECK(std::abs(t.amp[0b10 << 1] - cplx(0.5)) < 1e-14);

  StateVector w = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard(w, 0);  // (|00> + |10>)/sqrt(2) on the medium
  apply_swap(w, 0, 1);   // -> (|00> + |01>)/sqrt(2)
  const double r = std::sqrt(0.5);
  CHECK(std::abs(w.amp[0b01 << 1] - cplx(r)) < 1e-15);
  CHECK(std::abs(w.amp[0b10 << 1]) < 1e-15);
}

TEST_CASE("QFT matches the direct transform and inverts cleanly") {
  RegisterLayout l{0, 3, 0, 1};
  const std::uint64_t x = 5;
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  // build |x> on the medium by treating the bottom as untouched padding
  s.amp[0] = 0.0;
  s.amp[x << 1] = 1.0;
  apply_qft(s, s.layout.medium_qubits(), false);
  for (std::uint64_t y = 0; y < 8; ++y) {
    const double ang = 2.0 * std::numbers::pi * double(x * y) / 8.0;
    const cplx want = cplx(std::cos(ang), std::sin(ang)) / std::sqrt(8.0);
    CHECK(std::abs(s.amp[y << 1] - want) < 1e-13);
  }

  StateVector r = random_state(RegisterLayout{0, 10, 0, 0}, 99);
  StateVector copy = r;
  apply_qft(r, r.layout.medium_qubits(), false);
  apply_inverse_qft(r, r.layout.medium_qubits());
  double dev = 0.0;
  for (std::size_t i = 0; i < r.amp.size(); ++i) dev = std::max(dev, std::abs(r.amp[i] - copy.amp[i]));
  CHECK(dev < 1e-12);
}

TEST_CASE("multiplexed rotation keys the angle on the accuracy value") {
  RegisterLayout l{1, 2, 0, 1};
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard_block(s, s.layout.accuracy_qubits());
  Vec angles = {0.0, 0.3, 1.1, 2.9};
  apply_multiplexed_rotation(s, s.layout.accuracy_qubits(), s.layout.top_qubits()[0], angles);
  for (std::uint64_t v = 0; v < 4; ++v) {
    const std::uint64_t lo = v << 1, hi = (1ull << 3) | (v << 1);  // top bit is the global MSB
    CHECK(std::abs(s.amp[lo] - cplx(0.5 * std::cos(angles[v] / 2))) < 1e-14);
    CHECK(std::abs(s.amp[hi] - cplx(0.5 * std::sin(angles[v] / 2))) < 1e-14);
  }
}

TEST_CASE("rotation through an occupied NaN bin is an error; unoccupied is fine") {
  RegisterLayout l{1, 1, 0, 1};
  const double nan = std::nan("");
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  CHECK_THROWS_AS(
      apply_multiplexed_rotation(s, s.layout.accuracy_qubits(), s.layout.top_qubits()[0],
                                 {nan, 0.7}),
      Error);
  StateVector t = init_with_amplitudes(l, {1.0, 0.0});
  CHECK_NOTHROW(apply_multiplexed_rotation(t, t.layout.accuracy_qubits(), t.layout.top_qubits()[0],
                                           {0.7, nan}));
}

TEST_CASE("marginals, projection, and sampling agree") {
  RegisterLayout l{1, 2, 0, 1};
  StateVector s = init_with_amplitudes(l, {0.6, 0.8});
  apply_hadamard(s, l.top_qubits()[0]);
  Vec topm = marginal_probabilities(s, l.top_qubits());
  CHECK(topm[0] == doctest::Approx(0.5).epsilon(1e-12));
  Vec botm = marginal_probabilities(s, l.bottom_qubits());
  CHECK(botm[0] == doctest::Approx(0.36).epsilon(1e-12));
  CHECK(botm[1] == doctest::Approx(0.64).epsilon(1e-12));

  const double p = project(s, l.top_qubits(), 1);
  CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
  Vec topm2 = marginal_probabilities(s, l.top_qubits());
  CHECK(topm2[1] == doctest::Approx(1.0).epsilon(1e-12));

  // projecting medium onto |00> keeps everything (medium never left |00>)
  CHECK(project(s, l.medium_qubits(), 0) == doctest::Approx(1.0).epsilon(1e-12));
  // now a zero-probability outcome
  CHECK_THROWS_AS(project(s, l.top_qubits(), 0), Error);
}

TEST_CASE("sampling is seeded and consistent with the marginal") {
  RegisterLayout l{0, 2, 0, 1};
  StateVector s = init_with_amplitudes(l, {1.0, 0.0});
  apply_hadamard_block(s, s.layout.medium_qubits());
  auto h1 = sample(s, s.layout.medium_qubits(), 40000, 123);
  auto h2 = sample(s, s.layout.medium_qubits(), 40000, 123);
  CHECK(h1 == h2);
  auto h3 = sample(s, s.layout.medium_qubits(), 40000, 124);
  CHECK(h1 != h3);
  std::uint64_t total = 0;
  for (const auto& [v, c] : h1) {
    CHECK(v < 4);
    total += c;
    CHECK(double(c) / 40000.0 == doctest::Approx(0.25).epsilon(0.05));
  }
  CHECK(total == 40000);
}

TEST_CASE("norm is preserved through a unitary pipeline") {
  StateVector s = random_state(RegisterLayout{1, 4, 2, 2}, 7);
  apply_hadamard_block(s, s.layout.medium_qubits());
  apply_qft(s, s.layout.medium_qubits(), false);
  apply_controlled_phase(s, 0, 3, 0.77);
  apply_swap(s, 2, 5);
  apply_inverse_qft(s, s.layout.medium_qubits());
  CHECK(s.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}
