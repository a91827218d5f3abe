// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Limiting entry processes of the tridiagonalized GbE process and the
// transforms that put finite-n entries on the same scale.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dbm/core/error.hpp"
#include "dbm/core/field.hpp"
#include "dbm/core/rng.hpp"
#include "dbm/process.hpp"
#include "dbm/tridiag.hpp"

namespace dbm {

/// A_j ~ sqrt(2) OU(2j - 1) and B_j ~ sqrt(2) OU(2j), all independent.
struct LimitEntryProcesses {
  TimeGrid grid;
  std::size_t k = 0;
  std::vector<OuPath> a;
  std::vector<OuPath> b;

  static double a_rate(std::size_t j) { return 2.0 * static_cast<double>(j) - 1.0; }
  static double b_rate(std::size_t j) { return 2.0 * static_cast<double>(j); }
};

inline LimitEntryProcesses limit_entries_sample(std::size_t k, const TimeGrid& grid, Engine& engine) {
  detail::require(k >= 1, "corner size k must be >= 1");
  std::vector<double> rates;
  rates.reserve(2 * k);
  for (std::size_t j = 1; j <= k; ++j) rates.push_back(LimitEntryProcesses::a_rate(j));
  for (std::size_t j = 1; j <= k; ++j) rates.push_back(LimitEntryProcesses::b_rate(j));
  const OuVectorPath joint = ou_sample_vector(rates, grid, engine);

  LimitEntryProcesses out{grid, k, {}, {}};
  const double scale = std::sqrt(2.0);
  for (std::size_t e = 0; e < 2 * k; ++e) {
    OuPath p = joint.entry(e);
    for (double& v : p.values) v *= scale;
    (e < k ? out.a : out.b).push_back(std::move(p));
  }
  return out;
}

inline LimitEntryProcesses limit_entries_sample(std::size_t k, const TimeGrid& grid, std::uint64_t seed) {
  Engine engine(seed);
  return limit_entries_sample(k, grid, engine);
}

/// (a_1..a_k, (b_1^2 - beta n)/(beta sqrt n), ..) per time step.
struct EntryVectorPath {
  TimeGrid grid;
  std::size_t k = 0;
  int beta = 1;
  double n = 0.0;
  std::vector<double> a;  // time-major, steps x k
  std::vector<double> b;

  double a_at(std::size_t step, std::size_t j) const { return a[step * k + j - 1]; }
  double b_at(std::size_t step, std::size_t j) const { return b[step * k + j - 1]; }
};

inline double normalized_offdiag_square(double b, int beta, double n) {
  const double bn = static_cast<double>(beta) * n;
  return (b * b - bn) / (static_cast<double>(beta) * std::sqrt(n));
}

/// `n` is the dimension parameter of the normalization; for an
/// (n+1) x (n+1) input it is one less than the frame size.
inline EntryVectorPath entry_vector_from_tridiagonal(const SymTridiagonalPath& path, std::size_t k, int beta,
                                                     double n) {
  validate_beta(beta);
  detail::require(k >= 1, "k must be >= 1");
  detail::require(n > static_cast<double>(k) + 3.0, "entry processes up to k need n > k + 3");
  detail::require(path.frames.size() == path.grid.steps, "path frame count must match its grid");

  EntryVectorPath out{path.grid, k, beta, n, {}, {}};
  out.a.reserve(path.frames.size() * k);
  out.b.reserve(path.frames.size() * k);
  for (const auto& f : path.frames) {
    detail::require(f.offdiag.size() >= k && f.diag.size() >= k, "k too large for the tridiagonal frames");
    for (std::size_t j = 0; j < k; ++j) out.a.push_back(f.diag[j]);
    for (std::size_t j = 0; j < k; ++j) out.b.push_back(normalized_offdiag_square(f.offdiag[j], beta, n));
  }
  return out;
}

/// b_hat(t) = sqrt(beta m + sqrt(beta m) B(t)). With beta = 1 and m = n this
/// is sqrt(n + sqrt(n) B). Returns nullopt if the radicand is not positive
/// somewhere on the path; callers count those samples and drop them.
inline std::optional<OuPath> bhat_transform(const OuPath& b, double m, int beta = 1) {
  validate_beta(beta);
  detail::require(m > 0.0, "bhat centring must be positive");
  const double bm = static_cast<double>(beta) * m;
  const double scale = std::sqrt(bm);
  OuPath out{b.grid, std::vector<double>(b.values.size())};
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    const double r = bm + scale * b.values[i];
    if (!(r > 0.0)) return std::nullopt;
    out.values[i] = std::sqrt(r);
  }
  return out;
}

struct NormModelPath {
  TimeGrid grid;
  /// sqrt(beta) ||v(t)||.
  std::vector<double> norm;
  /// (||v(t)||^2 - dim) / sqrt(2 dim), asymptotically OU(2j).
  std::vector<double> centred;
};

/// Norm of a dim = n - j vector of independent OU(j) processes.
inline NormModelPath norm_model_offdiag(std::size_t n, std::size_t j, const TimeGrid& grid, Engine& engine,
                                        int beta = 1) {
  validate_beta(beta);
  detail::require(j >= 1 && n > j, "norm model needs 1 <= j < n");
  const std::size_t dim = n - j;
  const OuVectorPath v = ou_sample_vector(OuParams{static_cast<double>(j)}, dim, grid, engine);
  NormModelPath out{grid, std::vector<double>(grid.steps), std::vector<double>(grid.steps)};
  const double d = static_cast<double>(dim);
  for (std::size_t s = 0; s < grid.steps; ++s) {
    double sq = 0.0;
    for (double x : v.at(s)) sq += x * x;
    out.norm[s] = std::sqrt(static_cast<double>(beta) * sq);
    out.centred[s] = (sq - d) / std::sqrt(2.0 * d);
  }
  return out;
}

inline NormModelPath norm_model_offdiag(std::size_t n, std::size_t j, const TimeGrid& grid, std::uint64_t seed,
                                        int beta = 1) {
  Engine engine(seed);
  return norm_model_offdiag(n, j, grid, engine, beta);
}

}  // namespace dbm
