// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Extreme eigenvalues of symmetric tridiagonal matrices by Sturm-count
// bisection, leading corners, and edge rescaling of eigenvalue paths.

#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dbm/core/error.hpp"
#include "dbm/process.hpp"
#include "dbm/tridiag.hpp"

namespace dbm {

namespace detail {

inline double pivot_floor(const SymTridiagonal& t) {
  double bmax = 1.0;
  for (double b : t.offdiag) bmax = std::max(bmax, b * b);
  return std::max(1e-300, DBL_MIN * bmax);
}

}  // namespace detail

/// Closed interval containing the spectrum (Gershgorin).
struct SpectrumBounds {
  double lo = 0.0;
  double hi = 0.0;
};

inline SpectrumBounds gershgorin(const SymTridiagonal& t) {
  detail::require(t.size() > 0, "empty matrix");
  SpectrumBounds s{INFINITY, -INFINITY};
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = (i > 0 ? std::abs(t.offdiag[i - 1]) : 0.0) + (i + 1 < t.size() ? std::abs(t.offdiag[i]) : 0.0);
    s.lo = std::min(s.lo, t.diag[i] - r);
    s.hi = std::max(s.hi, t.diag[i] + r);
  }
  return s;
}

/// Number of eigenvalues below x: negative pivots of the LDL' factorization
/// of T - x I. Pivots smaller in magnitude than a tiny floor are replaced by
/// minus that floor.
inline std::size_t sturm_count(const SymTridiagonal& t, double x, double pivmin) {
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double b2 = i > 0 ? t.offdiag[i - 1] * t.offdiag[i - 1] : 0.0;
    d = (t.diag[i] - x) - (i > 0 ? b2 / d : 0.0);
    if (std::abs(d) <= pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

inline std::size_t sturm_count(const SymTridiagonal& t, double x) {
  return sturm_count(t, x, detail::pivot_floor(t));
}

enum class Which { largest, smallest };

struct EigenRequest {
  SymTridiagonal matrix;
  std::size_t how_many = 1;
  Which which = Which::largest;
  /// Absolute tolerance; non-positive means 1e-10 times the spectral scale.
  double tol = 0.0;
};

namespace detail {

/// Eigenvalue number r (0-based, ascending) by bisection.
inline double bisect_eigenvalue(const SymTridiagonal& t, std::size_t r, SpectrumBounds b, double tol, double pivmin) {
  double lo = b.lo;
  double hi = b.hi;
  // sturm_count(lo) <= r < sturm_count(hi) holds throughout.
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid, pivmin) <= r) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// The requested extreme eigenvalues: largest first for Which::largest,
/// smallest first for Which::smallest.
inline std::vector<double> eigs_extreme(const EigenRequest& req) {
  const SymTridiagonal& t = req.matrix;
  const std::size_t n = t.size();
  detail::require(n >= 1, "empty matrix");
  detail::require(req.how_many >= 1 && req.how_many <= n, "how_many must lie in [1, N]");
  t.validate();

  SpectrumBounds b = gershgorin(t);
  const double scale = std::max({std::abs(b.lo), std::abs(b.hi), 1e-300});
  const double tol = req.tol > 0.0 ? req.tol : 1e-10 * scale;
  // Widen so both ends strictly bracket the spectrum.
  const double pad = 2.0 * DBL_EPSILON * scale + tol;
  b.lo -= pad;
  b.hi += pad;
  const double pivmin = detail::pivot_floor(t);

  std::vector<double> out;
  out.reserve(req.how_many);
  for (std::size_t i = 0; i < req.how_many; ++i) {
    const std::size_t r = req.which == Which::largest ? n - 1 - i : i;
    out.push_back(detail::bisect_eigenvalue(t, r, b, tol, pivmin));
  }
  return out;
}

inline double lambda_max(const SymTridiagonal& t, double tol = 0.0) {
  return eigs_extreme({t, 1, Which::largest, tol}).front();
}

/// Leading k x k principal submatrix.
inline SymTridiagonal corner(const SymTridiagonal& t, std::size_t k) {
  detail::require(k >= 1 && k <= t.size(), "corner size must lie in [1, N]");
  SymTridiagonal c;
  c.diag.assign(t.diag.begin(), t.diag.begin() + static_cast<std::ptrdiff_t>(k));
  c.offdiag.assign(t.offdiag.begin(), t.offdiag.begin() + static_cast<std::ptrdiff_t>(k - 1));
  return c;
}

/// ceil(10 n^{1/3}), computed exactly as the least m with m^3 >= 1000 n.
inline std::size_t corner_size_rule(std::size_t n) {
  detail::require(n >= 1, "n must be >= 1");
  auto m = static_cast<std::uint64_t>(std::floor(10.0 * std::cbrt(static_cast<double>(n))));
  if (m > 0) --m;
  const auto target = static_cast<std::uint64_t>(n) * 1000;
  while (m * m * m < target) ++m;
  return static_cast<std::size_t>(m);
}

/// Eigenvalues per frame, sorted in descending order.
struct EigenProcessPath {
  TimeGrid grid;
  std::vector<std::vector<double>> values;

  std::vector<double> top() const {
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(v.front());
    return out;
  }
};

/// x -> n^{1/6} (x - 2 sqrt n) with time relabelled t -> n^{1/3} t.
inline EigenProcessPath airy_rescale(const EigenProcessPath& path, double n) {
  detail::require(n > 0.0, "n must be positive");
  path.grid.validate();
  detail::require(path.values.size() == path.grid.steps, "path frame count must match its grid");
  const double tscale = std::cbrt(n);
  const double vscale = std::pow(n, 1.0 / 6.0);
  const double edge = 2.0 * std::sqrt(n);
  EigenProcessPath out{{path.grid.t0 * tscale, path.grid.dt * tscale, path.grid.steps}, path.values};
  for (auto& frame : out.values)
    for (double& x : frame) x = vscale * (x - edge);
  return out;
}

}  // namespace dbm
