#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "icefreq/error.hpp"

namespace icefreq {

// Dense row-major matrix. Everything here is sized for regression problems
// with a handful of coefficients; no attempt at blocking or BLAS.
struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// ok == false reports the first column where the pivot failed.
struct Cholesky {
  Mat L;
  bool ok = false;
  std::size_t fail_col = 0;
};

inline Cholesky cholesky(const Mat& s) {
  const std::size_t n = s.rows;
  Cholesky ch;
  ch.L = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = s(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= ch.L(j, k) * ch.L(j, k);
    if (!(d > 0.0) || !std::isfinite(d)) {
      ch.ok = false;
      ch.fail_col = j;
      return ch;
    }
    const double ljj = std::sqrt(d);
    ch.L(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = s(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= ch.L(i, k) * ch.L(j, k);
      ch.L(i, j) = v / ljj;
    }
  }
  ch.ok = true;
  return ch;
}

// Solve (L L^T) x = b.
inline std::vector<double> chol_solve(const Cholesky& ch, const std::vector<double>& b) {
  const std::size_t n = ch.L.rows;
  std::vector<double> y(n), x(n);
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= ch.L(i, k) * y[k];
    y[i] = v / ch.L(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= ch.L(k, ii) * x[k];
    x[ii] = v / ch.L(ii, ii);
  }
  return x;
}

inline Mat chol_inverse(const Cholesky& ch) {
  const std::size_t n = ch.L.rows;
  Mat inv(n, n);
  std::vector<double> e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = chol_solve(ch, e);
    for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  // symmetrize against round-off
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (inv(i, j) + inv(j, i));
      inv(i, j) = inv(j, i) = v;
    }
  return inv;
}

// log det of the factored matrix: 2 * sum log L_jj.
inline double chol_logdet(const Cholesky& ch) {
  double s = 0;
  for (std::size_t j = 0; j < ch.L.rows; ++j) s += std::log(ch.L(j, j));
  return 2.0 * s;
}

}  // namespace icefreq
