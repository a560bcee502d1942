#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace qpf {

using Vec = std::vector<double>;
using CMat = std::vector<std::vector<std::complex<double>>>;

// Dense real symmetric matrix, row-major. Symmetry is enforced on construction
// (entries must match exactly as stored).
struct SymMatrix {
  std::size_t n = 0;
  std::vector<double> a;  // row-major, n*n

  SymMatrix() = default;
  SymMatrix(std::size_t n_, std::vector<double> entries);
  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(const Vec& d);

  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }

  double frobenius_norm() const;
  Vec multiply(const Vec& x) const;
};

// Eigendecomposition of a symmetric matrix. Eigenvalues ascend; eigenvectors
// are orthonormal columns with the sign convention that each column's first
// nonzero component is positive. `projections` (p_j = <u_j|rhs>) is filled by
// with_projections(); empty until then.
struct SpectralDecomposition {
  Vec eigenvalues;                 // ascending
  std::vector<Vec> eigenvectors;   // eigenvectors[j] is the column for eigenvalues[j]
  Vec projections;                 // p_j = <u_j | rhs>, optional

  std::size_t dim() const { return eigenvalues.size(); }
  // Synthesize sum_j coeff_j * u_j.
  Vec combine(const Vec& coeffs) const;
};

// Cyclic Jacobi eigensolver. Sweeps until the off-diagonal Frobenius mass
// drops below 1e-14 * ||m||, capped at 100 sweeps (throws on non-convergence
// reporting the residual off-diagonal norm).
SpectralDecomposition eigh(const SymMatrix& m);

// Returns a copy of `sd` with projections p_j = <u_j|rhs> filled in.
SpectralDecomposition with_projections(const SpectralDecomposition& sd, const Vec& rhs);

// Gaussian elimination with partial pivoting. Throws a singular-matrix error
// naming the pivot index when a pivot magnitude falls below 1e-12 * ||m||.
Vec lu_solve(const SymMatrix& m, const Vec& rhs);

// max_i sum_j |m_ij|; every eigenvalue lies in [-bound, bound].
double gershgorin_bound(const SymMatrix& m);

// U = sum_j exp(2*pi*i*lambda_j*t) u_j u_j^T, unitary for real t.
CMat matrix_phase_unitary(const SpectralDecomposition& sd, double t);

// pad a unitary with the identity up to `dim` (for registers wider than the
// system dimension; the padded basis states never carry amplitude)
CMat embed_unitary(const CMat& u, std::size_t dim);

double dot(const Vec& x, const Vec& y);
double norm2(const Vec& x);
Vec normalized(const Vec& x);

// sin(pi*x) / cos(pi*x) with exact fmod argument reduction, precise for large x.
double sinpi(double x);
double cospi(double x);

}  // namespace qpf
