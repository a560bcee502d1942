#include "qpf/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qpf/errors.hpp"

namespace qpf {

SymMatrix::SymMatrix(std::size_t n_, std::vector<double> entries) : n(n_), a(std::move(entries)) {
  if (n == 0) throw validation_error("matrix dimension must be >= 1");
  if (a.size() != n * n) throw validation_error("matrix entry count does not match dimension");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (a[i * n + j] != a[j * n + i])
        throw validation_error("matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) + ")");
}

SymMatrix SymMatrix::identity(std::size_t n) {
  std::vector<double> e(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
  return SymMatrix(n, std::move(e));
}

SymMatrix SymMatrix::diagonal(const Vec& d) {
  std::vector<double> e(d.size() * d.size(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) e[i * d.size() + i] = d[i];
  return SymMatrix(d.size(), std::move(e));
}

double SymMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Vec SymMatrix::multiply(const Vec& x) const {
  Vec y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += a[i * n + j] * x[j];
    y[i] = s;
  }
  return y;
}

Vec SpectralDecomposition::combine(const Vec& coeffs) const {
  std::size_t n = dim();
  Vec y(n, 0.0);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t q = 0; q < n; ++q) y[q] += coeffs[j] * eigenvectors[j][q];
  return y;
}

SpectralDecomposition eigh(const SymMatrix& m) {
  const std::size_t n = m.n;
  std::vector<double> a = m.a;           // working copy, kept symmetric
  std::vector<double> v(n * n, 0.0);     // accumulated rotations, row-major
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
  };

  const double threshold = 1e-14 * std::max(m.frobenius_norm(), 1e-300);
  const int max_sweeps = 100;
  int sweep = 0;
  while (off_norm() > threshold) {
    if (++sweep > max_sweeps) {
      std::ostringstream os;
      os << "eigensolver did not converge after " << max_sweeps
         << " sweeps; off-diagonal norm " << off_norm();
      throw numerical_error(os.str());
    }
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double apq = a[p * n + q];
        if (apq == 0.0) continue;
        double app = a[p * n + p], aqq = a[q * n + q];
        double tau = (aqq - app) / (2.0 * apq);
        double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        double c = 1.0 / std::sqrt(1.0 + t * t);
        double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          double vkp = v[k * n + p], vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });

  SpectralDecomposition sd;
  sd.eigenvalues.resize(n);
  sd.eigenvectors.assign(n, Vec(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t col = order[j];
    sd.eigenvalues[j] = a[col * n + col];
    for (std::size_t i = 0; i < n; ++i) sd.eigenvectors[j][i] = v[i * n + col];
    for (std::size_t i = 0; i < n; ++i) {
      if (sd.eigenvectors[j][i] != 0.0) {
        if (sd.eigenvectors[j][i] < 0.0)
          for (double& x : sd.eigenvectors[j]) x = -x;
        break;
      }
    }
  }
  return sd;
}

SpectralDecomposition with_projections(const SpectralDecomposition& sd, const Vec& rhs) {
  if (rhs.size() != sd.dim()) throw validation_error("projection vector dimension mismatch");
  SpectralDecomposition out = sd;
  out.projections.resize(sd.dim());
  for (std::size_t j = 0; j < sd.dim(); ++j) out.projections[j] = dot(sd.eigenvectors[j], rhs);
  return out;
}

Vec lu_solve(const SymMatrix& m, const Vec& rhs) {
  const std::size_t n = m.n;
  if (rhs.size() != n) throw validation_error("rhs dimension mismatch");
  std::vector<double> a = m.a;
  Vec b = rhs;
  const double tiny = 1e-12 * std::max(m.frobenius_norm(), 1e-300);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
    if (std::abs(a[piv * n + k]) <= tiny)
      throw numerical_error("singular matrix: pivot " + std::to_string(k) + " magnitude " +
                            std::to_string(std::abs(a[piv * n + k])));
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

double gershgorin_bound(const SymMatrix& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) row += std::abs(m(i, j));
    best = std::max(best, row);
  }
  return best;
}

CMat embed_unitary(const CMat& u, std::size_t dim) {
  if (u.size() > dim)
    throw validation_error("unitary of dimension " + std::to_string(u.size()) +
                           " does not fit a register of dimension " + std::to_string(dim));
  if (u.size() == dim) return u;
  // identity on the padding subspace: padded basis states carry no amplitude
  CMat e(dim, std::vector<std::complex<double>>(dim, 0.0));
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) e[i][j] = u[i][j];
  for (std::size_t i = u.size(); i < dim; ++i) e[i][i] = 1.0;
  return e;
}

CMat matrix_phase_unitary(const SpectralDecomposition& sd, double t) {
  const std::size_t n = sd.dim();
  CMat u(n, std::vector<std::complex<double>>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    // exp(2*pi*i*lambda*t) via exact fmod reduction of 2*lambda*t
    double x = 2.0 * sd.eigenvalues[j] * t;
    std::complex<double> phase(cospi(x), sinpi(x));
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c)
        u[r][c] += phase * sd.eigenvectors[j][r] * sd.eigenvectors[j][c];
  }
  return u;
}

double dot(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

Vec normalized(const Vec& x) {
  double n = norm2(x);
  if (n == 0.0) throw numerical_error("cannot normalize the zero vector");
  Vec y = x;
  for (double& v : y) v /= n;
  return y;
}

double sinpi(double x) {
  if (x < 0.0) return -sinpi(-x);
  double r = std::fmod(x, 2.0);  // exact for doubles; r in [0, 2)
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;  // exact; r in [0, 1)
    sign = -1.0;
  }
  if (r > 0.5) r = 1.0 - r;  // exact by Sterbenz; r in [0, 0.5]
  return sign * std::sin(std::numbers::pi * r);
}

double cospi(double x) {
  double r = std::fmod(std::fabs(x), 2.0);  // even function; r in [0, 2)
  double sign = 1.0;
  if (r >= 1.0) r = 2.0 - r;  // exact by Sterbenz; r in (0, 1]
  if (r > 0.5) {
    r = 1.0 - r;  // exact; r in [0, 0.5)
    sign = -1.0;
  }
  if (r == 0.5) return 0.0;  // exact zero at half-integers
  return sign * std::cos(std::numbers::pi * r);
}

}  // namespace qpf
