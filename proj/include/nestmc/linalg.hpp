#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "nestmc/errors.hpp"

namespace nestmc {

// Small dense row-major matrix. The problems in this library never need
// more than 4x4, so everything below is plain O(n^3) textbook code.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }
};

// Lower-triangular factor L with L L^T = cov. Only the lower triangle of
// cov is read. Throws NotPositiveDefinite when a pivot falls at or below
// 1e-12, which signals an invalid covariance input.
inline Matrix cholesky(const Matrix& cov) {
  if (cov.rows != cov.cols || cov.rows == 0)
    throw InvalidParameter("cholesky: matrix must be square and non-empty");
  const std::size_t n = cov.rows;
  Matrix lower(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double pivot = cov(j, j);
    for (std::size_t k = 0; k < j; ++k) pivot -= lower(j, k) * lower(j, k);
    if (pivot <= 1e-12)
      throw NotPositiveDefinite("cholesky: matrix is not positive definite");
    const double d = std::sqrt(pivot);
    lower(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = cov(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
      lower(i, j) = s / d;
    }
  }
  return lower;
}

inline std::vector<double> matvec(const Matrix& m, std::span<const double> v) {
  std::vector<double> out(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

// Solve L y = b (L lower-triangular).
inline std::vector<double> forward_solve(const Matrix& lower, std::span<const double> b) {
  const std::size_t n = lower.rows;
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t j = 0; j < i; ++j) s -= lower(i, j) * y[j];
    y[i] = s / lower(i, i);
  }
  return y;
}

// Solve L^T x = y given the lower factor L.
inline std::vector<double> backward_solve(const Matrix& lower, std::span<const double> y) {
  const std::size_t n = lower.rows;
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = y[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= lower(j, i) * x[j];
    x[i] = s / lower(i, i);
  }
  return x;
}

// Solve (L L^T) x = b.
inline std::vector<double> cholesky_solve(const Matrix& lower, std::span<const double> b) {
  return backward_solve(lower, forward_solve(lower, b));
}

// Inverse of an SPD matrix via its Cholesky factor.
inline Matrix spd_inverse(const Matrix& cov) {
  const Matrix lower = cholesky(cov);
  const std::size_t n = cov.rows;
  Matrix inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = cholesky_solve(lower, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  // symmetrize to wash out the tiny column-wise asymmetry of the solves
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = v;
      inv(j, i) = v;
    }
  return inv;
}

}  // namespace nestmc
