// Minimal dense linear algebra: a row-major matrix plus the Cholesky and
// triangular-solve routines the Gaussian-process code needs. Sizes here stay
// in the low hundreds, so plain loops are fast enough and keep the library
// free of external dependencies.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "alcs/errors.hpp"

namespace alcs {

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }

  std::span<const double> row_span(std::size_t r) const {
    return std::span<const double>(row(r), cols);
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// In-place lower Cholesky factorization of the symmetric matrix stored in
// `a` (only the lower triangle is read). Returns -1 on success, otherwise
// the index of the first non-positive pivot. The upper triangle is zeroed.
inline int cholesky_in_place(Matrix& a) {
  const std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double* rowj = a.row(j);
    double d = rowj[j];
    for (std::size_t k = 0; k < j; ++k) d -= rowj[k] * rowj[k];
    if (!(d > 0.0) || !std::isfinite(d)) return static_cast<int>(j);
    d = std::sqrt(d);
    rowj[j] = d;
    const double inv = 1.0 / d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* rowi = a.row(i);
      double s = rowi[j];
      for (std::size_t k = 0; k < j; ++k) s -= rowi[k] * rowj[k];
      rowi[j] = s * inv;
    }
  }
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = r + 1; c < n; ++c) a(r, c) = 0.0;
  return -1;
}

// Solve L x = b in place, L lower triangular.
inline void solve_lower(const Matrix& L, std::span<double> x) {
  const std::size_t n = L.rows;
  for (std::size_t i = 0; i < n; ++i) {
    const double* rowi = L.row(i);
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= rowi[k] * x[k];
    x[i] = s / rowi[i];
  }
}

// Solve L^T x = b in place, L lower triangular.
inline void solve_lower_transposed(const Matrix& L, std::span<double> x) {
  const std::size_t n = L.rows;
  for (std::size_t i = n; i-- > 0;) {
    double s = x[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= L(k, i) * x[k];
    x[i] = s / L(i, i);
  }
}

// x = A^{-1} b for symmetric positive definite A given its Cholesky factor.
inline std::vector<double> cholesky_solve(const Matrix& L, std::span<const double> b) {
  std::vector<double> x(b.begin(), b.end());
  solve_lower(L, x);
  solve_lower_transposed(L, x);
  return x;
}

// Pairwise squared distances between rows of X (n x n, full symmetric fill).
inline Matrix pairwise_squared_distances(const Matrix& x) {
  Matrix d(x.rows, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    d(i, i) = 0.0;
    for (std::size_t j = i + 1; j < x.rows; ++j) {
      double v = squared_distance(x.row_span(i), x.row_span(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

}  // namespace alcs
