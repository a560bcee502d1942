#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "qpf/errors.hpp"
#include "qpf/linalg.hpp"

using namespace qpf;

namespace {

SymMatrix random_spd(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> r(n * n);
  for (double& v : r) v = dist(rng);
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += r[k * n + i] * r[k * n + j];
      a[i * n + j] = s + (i == j ? 0.5 : 0.0);
    }
  return SymMatrix(n, std::move(a));
}

}  // namespace

TEST_CASE("symmetric matrix construction enforces symmetry") {
  CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 3.0, 4.0}), Error);
  CHECK_THROWS_AS(SymMatrix(2, {1.0, 2.0, 2.0}), Error);  // wrong entry count
  SymMatrix m(2, {1.0, 2.0, 2.0, 4.0});
  CHECK(m(0, 1) == 2.0);
  CHECK(SymMatrix::identity(3)(2, 2) == 1.0);
  CHECK(SymMatrix::diagonal({5.0, 7.0})(1, 1) == 7.0);
}

TEST_CASE("matrix-vector multiply") {
  SymMatrix m(2, {2.0, 1.0, 1.0, 3.0});
  Vec y = m.multiply({1.0, 2.0});
  CHECK(y[0] == doctest::Approx(4.0));
  CHECK(y[1] == doctest::Approx(7.0));
}

TEST_CASE("eigensolver on a diagonal matrix sorts ascending") {
  SpectralDecomposition sd = eigh(SymMatrix::diagonal({3.0, 1.0, 2.0}));
  REQUIRE(sd.dim() == 3);
  CHECK(sd.eigenvalues[0] == doctest::Approx(1.0));
  CHECK(sd.eigenvalues[1] == doctest::Approx(2.0));
  CHECK(sd.eigenvalues[2] == doctest::Approx(3.0));
  // eigenvector for eigenvalue 1 is e_1, first nonzero component positive
  CHECK(sd.eigenvectors[0][1] == doctest::Approx(1.0));
}

TEST_CASE("eigensolver 2x2 closed form") {
  SpectralDecomposition sd = eigh(SymMatrix(2, {2.0, 1.0, 1.0, 2.0}));
  CHECK(sd.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sd.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(sd.eigenvectors[1][0]) == doctest::Approx(r));
  CHECK(sd.eigenvectors[1][0] * sd.eigenvectors[1][1] > 0.0);  // (1,1) direction
}

TEST_CASE("eigenpairs satisfy B u = lambda u and are orthonormal") {
  const SymMatrix m = random_spd(6, 42);
  SpectralDecomposition sd = eigh(m);
  double trace = 0.0, esum = 0.0;
  for (std::size_t i = 0; i < 6; ++i) trace += m(i, i);
  for (std::size_t j = 0; j < sd.dim(); ++j) {
    esum += sd.eigenvalues[j];
    Vec bu = m.multiply(sd.eigenvectors[j]);
    for (std::size_t i = 0; i < 6; ++i)
      CHECK(bu[i] == doctest::Approx(sd.eigenvalues[j] * sd.eigenvectors[j][i]).epsilon(1e-10));
    for (std::size_t k = 0; k <= j; ++k)
      CHECK(dot(sd.eigenvectors[j], sd.eigenvectors[k]) ==
            doctest::Approx(j == k ? 1.0 : 0.0).epsilon(1e-12));
    // sign convention: first nonzero component positive
    for (double c : sd.eigenvectors[j]) {
      if (std::abs(c) > 1e-12) {
        CHECK(c > 0.0);
        break;
      }
    }
  }
  CHECK(esum == doctest::Approx(trace).epsilon(1e-12));
}

TEST_CASE("projections and combine round-trip a vector through the eigenbasis") {
  const SymMatrix m = random_spd(5, 7);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec rhs(5);
  for (double& v : rhs) v = dist(rng);
  SpectralDecomposition sd = with_projections(eigh(m), rhs);
  REQUIRE(sd.projections.size() == 5);
  Vec back = sd.combine(sd.projections);
  for (std::size_t i = 0; i < 5; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("linear solve against a known system and a residual check") {
  SymMatrix m(2, {2.0, 1.0, 1.0, 3.0});
  Vec x = lu_solve(m, {5.0, 10.0});
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-13));

  const SymMatrix big = random_spd(8, 3);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec rhs(8);
  for (double& v : rhs) v = dist(rng);
  Vec sol = lu_solve(big, rhs);
  Vec back = big.multiply(sol);
  for (std::size_t i = 0; i < 8; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-10));
}

TEST_CASE("singular solve reports a numerical error") {
  SymMatrix m(2, {1.0, 1.0, 1.0, 1.0});
  try {
    lu_solve(m, {1.0, 2.0});
    FAIL("expected a throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::numerical);
  }
}

TEST_CASE("row-sum spectral bound") {
  CHECK(gershgorin_bound(SymMatrix::diagonal({1.0, -5.0, 2.0})) == doctest::Approx(5.0));
  SymMatrix m(2, {2.0, -1.0, -1.0, 0.5});
  CHECK(gershgorin_bound(m) == doctest::Approx(3.0));
}

TEST_CASE("phase unitary: identity at t=0, unitary, correct diagonal action") {
  SpectralDecomposition sd = eigh(SymMatrix::diagonal({0.25, 0.75}));
  CMat u0 = matrix_phase_unitary(sd, 0.0);
  CHECK(std::abs(u0[0][0] - 1.0) < 1e-14);
  CHECK(std::abs(u0[0][1]) < 1e-14);

  CMat u = matrix_phase_unitary(sd, 1.0);
  // e^{2 pi i * 0.25} = i ; e^{2 pi i * 0.75} = -i
  CHECK(std::abs(u[0][0] - std::complex<double>(0.0, 1.0)) < 1e-12);
  CHECK(std::abs(u[1][1] - std::complex<double>(0.0, -1.0)) < 1e-12);

  // U U^dagger = I for a non-diagonal matrix
  SpectralDecomposition sd2 = eigh(SymMatrix(2, {0.4, 0.1, 0.1, 0.3}));
  CMat v = matrix_phase_unitary(sd2, 0.7);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < 2; ++k) s += v[i][k] * std::conj(v[j][k]);
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("unitary embedding pads with the identity") {
  SpectralDecomposition sd = eigh(SymMatrix::diagonal({0.25, 0.75}));
  const CMat u = matrix_phase_unitary(sd, 1.0);
  const CMat e = embed_unitary(u, 4);
  REQUIRE(e.size() == 4);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(e[i][j] - u[i][j]) == 0.0);
  for (std::size_t i = 2; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(e[i][j] == (i == j ? 1.0 : 0.0));
      CHECK(e[j][i] == (i == j ? 1.0 : 0.0));
    }
  CHECK(embed_unitary(u, 2) == u);
  CHECK_THROWS_AS(embed_unitary(e, 2), Error);
}

TEST_CASE("pi-argument trig is exact on the grid and handles huge arguments") {
  CHECK(sinpi(0.0) == 0.0);
  CHECK(sinpi(1.0) == 0.0);
  CHECK(sinpi(0.5) == 1.0);
  CHECK(cospi(0.5) == 0.0);
  CHECK(cospi(1.0) == -1.0);
  const double big = 4503599627370496.0;  // 2^52, even integer
  CHECK(sinpi(big) == 0.0);
  CHECK(sinpi(2251799813685248.5) == 1.0);  // 2^51 + 0.5 is exactly representable
  CHECK(sinpi(-0.5) == -1.0);
  CHECK(cospi(-0.5) == 0.0);
  CHECK(cospi(1.5) == 0.0);
  CHECK(sinpi(0.25) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
}

TEST_CASE("vector helpers") {
  CHECK(dot({1.0, 2.0}, {3.0, 4.0}) == doctest::Approx(11.0));
  CHECK(norm2({3.0, 4.0}) == doctest::Approx(5.0));
  Vec n = normalized({3.0, 4.0});
  CHECK(n[0] == doctest::Approx(0.6));
  CHECK(n[1] == doctest::Approx(0.8));
}
