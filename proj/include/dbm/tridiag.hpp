// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Householder tridiagonalization of self-adjoint matrices over R, C and H,
// using reflectors that map the eliminated column onto a non-negative
// multiple of e1 so every off-diagonal of the result is non-negative.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dbm/core/aligned.hpp"
#include "dbm/core/dense_matrix.hpp"
#include "dbm/core/error.hpp"
#include "dbm/core/field.hpp"
#include "dbm/process.hpp"

namespace dbm {

/// Reflectors with ||x - image e1|| below this fraction of ||x|| are replaced
/// by the identity.
inline constexpr double kReflectorDegeneracy = 1e-13;

/// Real symmetric tridiagonal matrix with non-negative off-diagonal.
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> offdiag;

  std::size_t size() const { return diag.size(); }

  void validate() const {
    detail::expect(diag.empty() ? offdiag.empty() : offdiag.size() + 1 == diag.size(),
                   "off-diagonal must have one entry fewer than the diagonal");
    for (double b : offdiag) detail::expect(b >= 0.0 && std::isfinite(b), "off-diagonal entries must be finite and >= 0");
    for (double a : diag) detail::expect(std::isfinite(a), "diagonal entries must be finite");
  }

  DenseMatrix<double> dense() const {
    DenseMatrix<double> m(size());
    for (std::size_t i = 0; i < size(); ++i) m(i, i) = diag[i];
    for (std::size_t i = 0; i < offdiag.size(); ++i) m(i + 1, i) = m(i, i + 1) = offdiag[i];
    return m;
  }

  friend bool operator==(const SymTridiagonal&, const SymTridiagonal&) = default;
};

struct SymTridiagonalPath {
  TimeGrid grid;
  std::vector<SymTridiagonal> frames;
};

/// H = I - 2 v v^* with H x = image e1. An empty v means H = I.
template <GbeField F>
struct HouseholderStep {
  std::vector<F> v;
  std::size_t k = 0;
  F image{};

  bool identity() const { return v.empty(); }

  std::vector<F> apply(std::span<const F> x) const {
    std::vector<F> y(x.begin(), x.end());
    if (identity()) return y;
    detail::expect(x.size() == v.size(), "reflector dimension mismatch");
    F s{};
    for (std::size_t i = 0; i < x.size(); ++i) s += conj_of(v[i]) * x[i];
    for (std::size_t i = 0; i < x.size(); ++i) y[i] -= 2.0 * (v[i] * s);
    return y;
  }

  DenseMatrix<F> matrix(std::size_t m) const {
    DenseMatrix<F> h = DenseMatrix<F>::identity(m);
    if (identity()) return h;
    detail::expect(m == v.size(), "reflector dimension mismatch");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) h(i, j) -= 2.0 * (v[i] * conj_of(v[j]));
    return h;
  }
};

/// Reflector taking x to image e1. Over R the image is +||x|| (no sign
/// flip for stability); over C and H it carries the phase of x_1, which
/// tridiagonalize later rotates away.
template <GbeField F>
HouseholderStep<F> householder_vector(std::span<const F> x, std::size_t k = 0) {
  HouseholderStep<F> step;
  step.k = k;
  if (x.empty()) return step;
  for (const F& e : x) detail::expect(std::isfinite(norm_of(e)), "reflector input must be finite");

  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += norm_of(x[i]);
  const double head = abs_of(x[0]);
  const double nx = std::sqrt(head * head + tail);
  step.image = x[0];
  if (nx == 0.0) return step;

  F u1{};
  F image{};
  if constexpr (is_real_field_v<F>) {
    // x1 - ||x|| without cancellation when x1 > 0.
    u1 = x[0] > 0.0 ? -tail / (x[0] + nx) : x[0] - nx;
    image = nx;
  } else {
    const F phase = head > 0.0 ? F(x[0] / head) : F(1.0);
    u1 = phase * (-tail / (head + nx));
    image = phase * nx;
  }
  const double unorm = std::sqrt(norm_of(u1) + tail);
  if (unorm < kReflectorDegeneracy * nx) return step;

  step.image = image;
  step.v.assign(x.begin(), x.end());
  step.v[0] = u1;
  for (auto& e : step.v) e = e / unorm;
  return step;
}

enum class TridiagStrategy {
  automatic,
  /// Rank-2 updates of a working copy.
  in_place,
  /// Reflectors accumulated as A - V W^* - W V^* and applied lazily; reads
  /// the input once per step and never writes it. Cheap for few steps.
  deferred,
};

struct TridiagOptions {
  /// Number of reflectors; the result then has steps + 1 diagonal and
  /// steps off-diagonal entries. Defaults to the full reduction.
  std::optional<std::size_t> steps;
  bool accumulate_transform = false;
  bool check_input = true;
  TridiagStrategy strategy = TridiagStrategy::automatic;
};

template <GbeField F>
struct Tridiagonalization {
  SymTridiagonal tridiagonal;
  /// Unitary Q with Q^* A Q = T on the reduced leading block.
  std::optional<DenseMatrix<F>> transform;
  /// Steps whose reflector was the identity (column already reduced, or zero).
  std::size_t identity_steps = 0;
  /// Steps whose eliminated column was exactly zero.
  std::size_t zero_columns = 0;
};

namespace detail {

/// sum conj(a_i) b_i in a fixed order, whatever the alignment of a and b.
template <GbeField F>
F dot_conj(const F* a, const F* b, std::size_t len) {
  if constexpr (is_real_field_v<F>) {
    double s[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= len; i += 4)
      for (std::size_t l = 0; l < 4; ++l) s[l] += a[i + l] * b[i + l];
    for (; i < len; ++i) s[0] += a[i] * b[i];
    return (s[0] + s[1]) + (s[2] + s[3]);
  } else {
    F s{};
    for (std::size_t i = 0; i < len; ++i) s += conj_of(a[i]) * b[i];
    return s;
  }
}

/// Per-thread aligned copies of vector operands for the Eigen kernels.
inline AlignedVector<double>& scratch(int slot) {
  thread_local AlignedVector<double> buf[3];
  return buf[slot];
}

inline const double* aligned_copy(const double* v, std::size_t m, int slot) {
  auto& b = scratch(slot);
  b.assign(v, v + m);
  return b.data();
}

/// out = A[k0:, k0:] * v for a self-adjoint A (only the lower triangle of
/// the block is read in the real case).
template <GbeField F>
void trailing_matvec(const DenseMatrix<F>& a, std::size_t k0, const F* v, F* out) {
  const std::size_t n = a.rows();
  const std::size_t m = n - k0;
  if constexpr (is_real_field_v<F>) {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMajor, 0, Eigen::OuterStride<>> blk(a.data() + k0 * n + k0, static_cast<Eigen::Index>(m),
                                                           static_cast<Eigen::Index>(m), Eigen::OuterStride<>(
                                                               static_cast<Eigen::Index>(n)));
    Eigen::Map<const Eigen::VectorXd> vv(aligned_copy(v, m, 0), static_cast<Eigen::Index>(m));
    auto& res = scratch(1);
    res.resize(m);
    Eigen::Map<Eigen::VectorXd> oo(res.data(), static_cast<Eigen::Index>(m));
    oo.noalias() = blk.template selfadjointView<Eigen::Lower>() * vv;
    std::copy(res.begin(), res.end(), out);
  } else {
    for (std::size_t r = 0; r < m; ++r) {
      const F* row = a.data() + (k0 + r) * n + k0;
      F s{};
      for (std::size_t c = 0; c < m; ++c) s += row[c] * v[c];
      out[r] = s;
    }
  }
}

/// A[k0:, k0:] -= 2 (v w^* + w v^*).
template <GbeField F>
void trailing_rank2(DenseMatrix<F>& a, std::size_t k0, const F* v, const F* w) {
  const std::size_t n = a.rows();
  const std::size_t m = n - k0;
  if constexpr (is_real_field_v<F>) {
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<RowMajor, 0, Eigen::OuterStride<>> blk(a.data() + k0 * n + k0, static_cast<Eigen::Index>(m),
                                                     static_cast<Eigen::Index>(m),
                                                     Eigen::OuterStride<>(static_cast<Eigen::Index>(n)));
    Eigen::Map<const Eigen::VectorXd> vv(aligned_copy(v, m, 0), static_cast<Eigen::Index>(m));
    Eigen::Map<const Eigen::VectorXd> ww(aligned_copy(w, m, 1), static_cast<Eigen::Index>(m));
    blk.noalias() -= 2.0 * vv * ww.transpose();
    blk.noalias() -= 2.0 * ww * vv.transpose();
  } else {
    for (std::size_t r = 0; r < m; ++r) {
      F* row = a.data() + (k0 + r) * n + k0;
      for (std::size_t c = 0; c < m; ++c) row[c] -= 2.0 * (v[r] * conj_of(w[c]) + w[r] * conj_of(v[c]));
    }
  }
}

/// w = p - v Re(v^* p): with p = A v this gives H A H = A - 2 (v w^* + w v^*).
template <GbeField F>
void rank2_direction(const F* v, std::vector<F>& p, std::size_t m) {
  const double kappa = real_of(dot_conj(v, p.data(), m));
  for (std::size_t i = 0; i < m; ++i) p[i] -= v[i] * kappa;
}

struct ReducedEntries {
  std::size_t identity_steps = 0;
  std::size_t zero_columns = 0;
};

template <GbeField F>
void record(const HouseholderStep<F>& step, std::span<const F> x, ReducedEntries& stats) {
  if (!step.identity()) return;
  ++stats.identity_steps;
  double s = 0.0;
  for (const F& e : x) s += norm_of(e);
  if (s == 0.0) ++stats.zero_columns;
}

template <GbeField F>
void accumulate_reflector(DenseMatrix<F>& q, std::size_t k0, const std::vector<F>& v) {
  const std::size_t n = q.rows();
  const std::size_t m = n - k0;
  for (std::size_t r = 0; r < n; ++r) {
    F* row = q.data() + r * n + k0;
    F s{};
    for (std::size_t c = 0; c < m; ++c) s += row[c] * v[c];
    for (std::size_t c = 0; c < m; ++c) row[c] -= 2.0 * (s * conj_of(v[c]));
  }
}

template <GbeField F>
ReducedEntries reduce_in_place(const DenseMatrix<F>& a, std::size_t steps, std::vector<double>& diag,
                               std::vector<F>& images, DenseMatrix<F>* q) {
  const std::size_t n = a.rows();
  DenseMatrix<F> work = a;
  ReducedEntries stats;
  std::vector<F> x;
  std::vector<F> p;
  for (std::size_t k = 0; k < steps; ++k) {
    diag[k] = real_of(work(k, k));
    const std::size_t m = n - k - 1;
    x.resize(m);
    for (std::size_t r = 0; r < m; ++r) x[r] = work(k + 1 + r, k);
    auto step = householder_vector<F>(x, k);
    images[k] = step.image;
    record<F>(step, x, stats);
    if (step.identity()) continue;
    p.resize(m);
    trailing_matvec(work, k + 1, step.v.data(), p.data());
    rank2_direction(step.v.data(), p, m);
    trailing_rank2(work, k + 1, step.v.data(), p.data());
    if (q) accumulate_reflector(*q, k + 1, step.v);
  }
  if (steps < n) diag[steps] = real_of(work(steps, steps));
  return stats;
}

template <GbeField F>
ReducedEntries reduce_deferred(const DenseMatrix<F>& a, std::size_t steps, std::vector<double>& diag,
                               std::vector<F>& images, DenseMatrix<F>* q) {
  const std::size_t n = a.rows();
  // Column i of vs/ws holds v_i, w_i on rows i+1.. and zeros above.
  std::vector<std::vector<F>> vs;
  std::vector<std::vector<F>> ws;
  vs.reserve(steps);
  ws.reserve(steps);
  ReducedEntries stats;

  auto entry = [&](std::size_t r, std::size_t c) {
    F e = a(r, c);
    for (std::size_t i = 0; i < vs.size(); ++i) e -= 2.0 * (vs[i][r] * conj_of(ws[i][c]) + ws[i][r] * conj_of(vs[i][c]));
    return e;
  };

  std::vector<F> x;
  std::vector<F> p;
  for (std::size_t k = 0; k < steps; ++k) {
    diag[k] = real_of(entry(k, k));
    const std::size_t k0 = k + 1;
    const std::size_t m = n - k0;
    x.resize(m);
    for (std::size_t r = 0; r < m; ++r) x[r] = entry(k0 + r, k);
    auto step = householder_vector<F>(x, k);
    images[k] = step.image;
    record<F>(step, x, stats);
    if (step.identity()) continue;

    p.resize(m);
    trailing_matvec(a, k0, step.v.data(), p.data());
    for (std::size_t i = 0; i < vs.size(); ++i) {
      const F* vi = vs[i].data() + k0;
      const F* wi = ws[i].data() + k0;
      const F wv = dot_conj(wi, step.v.data(), m);
      const F vv = dot_conj(vi, step.v.data(), m);
      for (std::size_t r = 0; r < m; ++r) p[r] -= 2.0 * (vi[r] * wv + wi[r] * vv);
    }
    rank2_direction(step.v.data(), p, m);

    std::vector<F> vfull(n);
    std::vector<F> wfull(n);
    std::copy(step.v.begin(), step.v.end(), vfull.begin() + static_cast<std::ptrdiff_t>(k0));
    std::copy(p.begin(), p.end(), wfull.begin() + static_cast<std::ptrdiff_t>(k0));
    vs.push_back(std::move(vfull));
    ws.push_back(std::move(wfull));
    if (q) accumulate_reflector(*q, k0, step.v);
  }
  if (steps < n) diag[steps] = real_of(entry(steps, steps));
  return stats;
}

}  // namespace detail

/// Householder tridiagonalization with non-negative off-diagonal. Over C and
/// H the complex/quaternion off-diagonals are finally rotated onto the
/// positive real axis by a diagonal unitary, so the result is always real.
template <GbeField F>
Tridiagonalization<F> tridiagonalize_with(const DenseMatrix<F>& a, const TridiagOptions& opts = {}) {
  detail::expect(a.square(), "tridiagonalize needs a square matrix");
  const std::size_t n = a.rows();
  if (opts.check_input) require_self_adjoint(a);

  const std::size_t full = n == 0 ? 0 : n - 1;
  const std::size_t steps = opts.steps.value_or(full);
  detail::require(steps <= full, "requested more reflector steps than the matrix admits");

  Tridiagonalization<F> out;
  if (n == 0) return out;
  std::vector<double> diag(steps + 1);
  std::vector<F> images(steps);
  std::optional<DenseMatrix<F>> q;
  if (opts.accumulate_transform) q = DenseMatrix<F>::identity(n);

  TridiagStrategy strategy = opts.strategy;
  if (strategy == TridiagStrategy::automatic)
    strategy = 4 * steps <= n ? TridiagStrategy::deferred : TridiagStrategy::in_place;
  const auto stats = strategy == TridiagStrategy::deferred
                         ? detail::reduce_deferred(a, steps, diag, images, q ? &*q : nullptr)
                         : detail::reduce_in_place(a, steps, diag, images, q ? &*q : nullptr);

  out.tridiagonal.diag = std::move(diag);
  out.tridiagonal.offdiag.resize(steps);
  for (std::size_t k = 0; k < steps; ++k) out.tridiagonal.offdiag[k] = abs_of(images[k]);
  out.identity_steps = stats.identity_steps;
  out.zero_columns = stats.zero_columns;

  if (q) {
    // Phase rotation D with d_{k+1} = image_k d_k / |image_k|.
    F d(1.0);
    for (std::size_t k = 0; k < steps; ++k) {
      const double mag = abs_of(images[k]);
      if (mag > 0.0) d = (images[k] / mag) * d;
      for (std::size_t r = 0; r < n; ++r) (*q)(r, k + 1) = (*q)(r, k + 1) * d;
    }
    out.transform = std::move(q);
  }
  return out;
}

template <GbeField F>
SymTridiagonal tridiagonalize(const DenseMatrix<F>& a, const TridiagOptions& opts = {}) {
  return tridiagonalize_with(a, opts).tridiagonal;
}

/// Frame-wise tridiagonalization of a matrix path.
template <GbeField F>
SymTridiagonalPath tridiagonalize_path(const GbePath<F>& path, const TridiagOptions& opts = {}) {
  SymTridiagonalPath out{path.grid, {}};
  out.frames.reserve(path.matrices.size());
  for (const auto& m : path.matrices) out.frames.push_back(tridiagonalize(m, opts));
  return out;
}

}  // namespace dbm
