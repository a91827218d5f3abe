// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "dbm/core/aligned.hpp"
#include "dbm/core/error.hpp"
#include "dbm/core/field.hpp"

namespace dbm {

/// Row-major dense matrix over one of the ensemble fields, stored 64-byte aligned.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T{}) {}
  explicit DenseMatrix(std::size_t n) : DenseMatrix(n, n) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1.0);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  AlignedVector<T> data_;
};

/// Largest deviation |A_ij - conj(A_ji)| relative to the largest entry modulus.
template <GbeField F>
double self_adjoint_defect(const DenseMatrix<F>& a) {
  detail::expect(a.square(), "matrix must be square");
  double scale = 0.0;
  double defect = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      scale = std::max(scale, norm_of(a(i, j)));
      defect = std::max(defect, norm_of(a(i, j) - conj_of(a(j, i))));
    }
  }
  if (scale == 0.0) return 0.0;
  return std::sqrt(defect / scale);
}

template <GbeField F>
void require_self_adjoint(const DenseMatrix<F>& a, double tol = 1e-12) {
  detail::expect(a.square(), "matrix must be square");
  detail::expect(self_adjoint_defect(a) <= tol, "matrix is not self-adjoint");
}

}  // namespace dbm
