// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Monic polynomials orthogonal for the semicircle law on [-2, 2]:
// P_0 = 1, P_1 = x, P_{k+1} = x P_k - P_{k-1}, i.e. P_k(x) = U_k(x / 2).

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "dbm/core/dense_matrix.hpp"
#include "dbm/core/error.hpp"
#include "dbm/core/field.hpp"
#include "dbm/tridiag.hpp"

namespace dbm {

/// Polynomial with exact 64-bit integer coefficients, coeffs[i] of x^i.
/// Arithmetic throws on overflow instead of wrapping.
struct IntPoly {
  std::vector<std::int64_t> coeffs;

  IntPoly() = default;
  explicit IntPoly(std::vector<std::int64_t> c) : coeffs(std::move(c)) { trim(); }

  static IntPoly monomial(std::size_t degree, std::int64_t c = 1) {
    std::vector<std::int64_t> v(degree + 1, 0);
    v[degree] = c;
    return IntPoly(std::move(v));
  }

  bool is_zero() const { return coeffs.empty(); }
  std::size_t degree() const {
    detail::expect(!is_zero(), "zero polynomial has no degree");
    return coeffs.size() - 1;
  }
  std::int64_t coeff(std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0; }

  double operator()(double x) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + static_cast<double>(coeffs[i]);
    return acc;
  }

  void trim() {
    while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
  }

  friend bool operator==(const IntPoly&, const IntPoly&) = default;
};

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  expect(!__builtin_add_overflow(a, b, &r), "integer polynomial coefficient overflow");
  return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  expect(!__builtin_mul_overflow(a, b, &r), "integer polynomial coefficient overflow");
  return r;
}

}  // namespace detail

inline IntPoly operator+(const IntPoly& p, const IntPoly& q) {
  std::vector<std::int64_t> c(std::max(p.coeffs.size(), q.coeffs.size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = detail::checked_add(p.coeff(i), q.coeff(i));
  return IntPoly(std::move(c));
}

inline IntPoly operator-(const IntPoly& p) {
  IntPoly r = p;
  for (auto& c : r.coeffs) c = detail::checked_mul(c, -1);
  return r;
}

inline IntPoly operator-(const IntPoly& p, const IntPoly& q) { return p + (-q); }

inline IntPoly operator*(const IntPoly& p, const IntPoly& q) {
  if (p.is_zero() || q.is_zero()) return {};
  std::vector<std::int64_t> c(p.coeffs.size() + q.coeffs.size() - 1, 0);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i)
    for (std::size_t j = 0; j < q.coeffs.size(); ++j)
      c[i + j] = detail::checked_add(c[i + j], detail::checked_mul(p.coeffs[i], q.coeffs[j]));
  return IntPoly(std::move(c));
}

inline std::string to_string(const IntPoly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  for (std::size_t i = p.coeffs.size(); i-- > 0;) {
    const std::int64_t c = p.coeffs[i];
    if (c == 0) continue;
    if (!s.empty()) s += c < 0 ? " - " : " + ";
    else if (c < 0) s += "-";
    const std::int64_t m = c < 0 ? -c : c;
    if (m != 1 || i == 0) s += std::to_string(m);
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s;
}

/// Monic P_k via the three-term recurrence.
inline IntPoly poly_p(std::size_t k) {
  IntPoly prev({1});
  if (k == 0) return prev;
  IntPoly cur({0, 1});
  const IntPoly x({0, 1});
  for (std::size_t j = 1; j < k; ++j) {
    IntPoly next = x * cur - prev;
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

/// Degrees d with P_j P_k = sum_d P_d, namely j + k - 2l for l = 0..min(j, k).
inline std::vector<std::size_t> poly_product_expand(std::size_t j, std::size_t k) {
  std::vector<std::size_t> out;
  const std::size_t m = std::min(j, k);
  out.reserve(m + 1);
  for (std::size_t l = 0; l <= m; ++l) out.push_back(j + k - 2 * l);
  return out;
}

/// Nodes and weights of the m-point Gauss rule for the semicircle density
/// sqrt(4 - x^2) / (2 pi) on [-2, 2]; exact for degree <= 2m - 1.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline Quadrature semicircle_quadrature(std::size_t m) {
  detail::require(m >= 1, "quadrature needs at least one node");
  Quadrature q;
  const double h = std::numbers::pi / static_cast<double>(m + 1);
  for (std::size_t i = 1; i <= m; ++i) {
    const double s = std::sin(h * static_cast<double>(i));
    q.nodes.push_back(2.0 * std::cos(h * static_cast<double>(i)));
    q.weights.push_back(2.0 / static_cast<double>(m + 1) * s * s);
  }
  return q;
}

/// [P_0(A/s) v, ..., P_kmax(A/s) v] by w_{j+1} = (A/s) w_j - w_{j-1}. A is
/// self-adjoint; only its lower triangle is read for real entries.
template <GbeField F>
std::vector<std::vector<F>> matrix_poly_sequence(std::size_t kmax, const DenseMatrix<F>& a, std::span<const F> v,
                                                 double scale = 1.0) {
  detail::require(a.square() && a.rows() == v.size(), "matrix and vector dimensions differ");
  detail::require(scale > 0.0, "scale must be positive");
  const std::size_t n = v.size();
  const double inv = 1.0 / scale;
  std::vector<std::vector<F>> seq;
  seq.reserve(kmax + 1);
  seq.emplace_back(v.begin(), v.end());
  if (kmax == 0) return seq;
  std::vector<F> w(n);
  detail::trailing_matvec(a, 0, seq[0].data(), w.data());
  for (auto& e : w) e = e * inv;
  seq.push_back(std::move(w));
  for (std::size_t j = 1; j < kmax; ++j) {
    std::vector<F> next(n);
    detail::trailing_matvec(a, 0, seq[j].data(), next.data());
    for (std::size_t i = 0; i < n; ++i) next[i] = next[i] * inv - seq[j - 1][i];
    seq.push_back(std::move(next));
  }
  return seq;
}

/// P_k(A / scale) v with k matrix-vector products.
template <GbeField F>
std::vector<F> matrix_poly_apply(std::size_t k, const DenseMatrix<F>& a, std::span<const F> v, double scale = 1.0) {
  if (k == 0) {
    detail::require(a.square() && a.rows() == v.size(), "matrix and vector dimensions differ");
    return {v.begin(), v.end()};
  }
  auto seq = matrix_poly_sequence(k, a, v, scale);
  return std::move(seq.back());
}

}  // namespace dbm
