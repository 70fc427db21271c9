// Copyright 2026 The emkt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "emkt/common.hpp"

namespace emkt {

/// Dense row-major matrix, just enough surface for the solvers here.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

/// LU factorization with partial pivoting (in place, row-major).
/// Solves A x = b and A^T x = b; both are needed by the simplex engine.
class LuFactor {
 public:
  LuFactor() = default;

  /// Factors `a` (consumed). Returns false if the matrix is numerically
  /// singular; the factor must not be used in that case.
  bool factor(Matrix a, double pivot_tol = 1e-11) {
    lu_ = std::move(a);
    n_ = lu_.rows();
    perm_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) perm_[i] = static_cast<int>(i);
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t piv = k;
      double best = std::fabs(lu_(k, k));
      for (std::size_t i = k + 1; i < n_; ++i) {
        double v = std::fabs(lu_(i, k));
        if (v > best) { best = v; piv = i; }
      }
      if (best < pivot_tol) return false;
      if (piv != k) {
        std::swap(perm_[k], perm_[piv]);
        double* rk = lu_.row(k);
        double* rp = lu_.row(piv);
        for (std::size_t j = 0; j < n_; ++j) std::swap(rk[j], rp[j]);
      }
      const double inv = 1.0 / lu_(k, k);
      for (std::size_t i = k + 1; i < n_; ++i) {
        double m = lu_(i, k) * inv;
        lu_(i, k) = m;
        if (m == 0.0) continue;
        const double* rk = lu_.row(k);
        double* ri = lu_.row(i);
        for (std::size_t j = k + 1; j < n_; ++j) ri[j] -= m * rk[j];
      }
    }
    return true;
  }

  std::size_t size() const { return n_; }

  /// x <- A^{-1} b
  void solve(std::vector<double>& x, const std::vector<double>& b) const {
    x.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = b[perm_[i]];
    // L y = Pb
    for (std::size_t i = 1; i < n_; ++i) {
      const double* ri = lu_.row(i);
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j) s -= ri[j] * x[j];
      x[i] = s;
    }
    // U x = y
    for (std::size_t ii = n_; ii-- > 0;) {
      const double* ri = lu_.row(ii);
      double s = x[ii];
      for (std::size_t j = ii + 1; j < n_; ++j) s -= ri[j] * x[j];
      x[ii] = s / ri[ii];
    }
  }

  /// x <- A^{-T} b
  void solve_transpose(std::vector<double>& x, const std::vector<double>& b) const {
    std::vector<double> y(b);
    // U^T z = b (forward)
    for (std::size_t i = 0; i < n_; ++i) {
      double s = y[i];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(j, i) * y[j];
      y[i] = s / lu_(i, i);
    }
    // L^T w = z (backward)
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < n_; ++j) s -= lu_(j, ii) * y[j];
      y[ii] = s;
    }
    // x = P^T w
    x.assign(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) x[perm_[i]] = y[i];
  }

 private:
  Matrix lu_;
  std::vector<int> perm_;
  std::size_t n_ = 0;
};

}  // namespace emkt
