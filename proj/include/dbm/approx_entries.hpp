// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Polynomial approximations of the leading tridiagonal entries of a real
// (n+1) x (n+1) GOE matrix, built from theta = M[1:, 0] / sqrt(n) and the
// minor M~ with its first row and column removed.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "dbm/chebyshev.hpp"
#include "dbm/core/dense_matrix.hpp"
#include "dbm/core/error.hpp"
#include "dbm/core/parallel.hpp"
#include "dbm/core/rng.hpp"
#include "dbm/process.hpp"
#include "dbm/stats.hpp"
#include "dbm/tridiag.hpp"

namespace dbm {

/// M with its first row and column set to zero.
inline DenseMatrix<double> tilde_m(const DenseMatrix<double>& m) {
  require_self_adjoint(m);
  DenseMatrix<double> out = m;
  for (std::size_t i = 0; i < m.rows(); ++i) out(0, i) = out(i, 0) = 0.0;
  return out;
}

/// tilde_a[j-1] approximates a_j; tilde_b_sq_centered[j-1] approximates
/// (b_j^2 - n) / sqrt(n).
struct ApproxEntryFrame {
  std::vector<double> tilde_a;
  std::vector<double> tilde_b_sq_centered;
};

/// a~_1 = M_11, a~_j = sqrt(n) theta' P_{2j-3}(M~/sqrt n) theta for j >= 2,
/// (b~_1^2 - n)/sqrt(n) = sqrt(n)(|theta|^2 - 1) and
/// (b~_j^2 - n)/sqrt(n) = sqrt(n) theta' P_{2j-2}(M~/sqrt n) theta for j >= 2.
///
/// The quadratic forms use theta_m = P_m theta only up to m = k - 1, via
/// P_{2m} = P_m^2 - P_{m-1}^2 and P_{2m-1} = (P_m - P_{m-2}) P_{m-1}.
inline ApproxEntryFrame approx_entries_frame(const DenseMatrix<double>& m, std::size_t k, bool check = true) {
  detail::require(m.square() && m.rows() >= 2, "matrix must be square of size >= 2");
  detail::require(k >= 1, "k must be >= 1");
  const std::size_t n = m.rows() - 1;
  detail::require(n > 2 * k + 3, "matrix too small for the requested number of entries");
  if (check) require_self_adjoint(m);

  const double sn = std::sqrt(static_cast<double>(n));
  std::vector<std::vector<double>> th;
  th.reserve(k);
  th.emplace_back(n);
  for (std::size_t i = 0; i < n; ++i) th[0][i] = m(i + 1, 0) / sn;
  for (std::size_t j = 1; j < k; ++j) {
    std::vector<double> next(n);
    detail::trailing_matvec(m, 1, th[j - 1].data(), next.data());
    for (std::size_t i = 0; i < n; ++i) next[i] /= sn;
    if (j >= 2)
      for (std::size_t i = 0; i < n; ++i) next[i] -= th[j - 2][i];
    th.push_back(std::move(next));
  }

  auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
    return detail::dot_conj(a.data(), b.data(), n);
  };
  std::vector<double> sq(k);
  for (std::size_t j = 0; j < k; ++j) sq[j] = dot(th[j], th[j]);
  // theta' P_{2r} theta and theta' P_{2r-1} theta.
  auto even = [&](std::size_t r) { return r == 0 ? sq[0] : sq[r] - sq[r - 1]; };
  auto odd = [&](std::size_t r) {
    const double head = dot(th[r], th[r - 1]);
    return r == 1 ? head : head - dot(th[r - 2], th[r - 1]);
  };

  ApproxEntryFrame f;
  f.tilde_a.resize(k);
  f.tilde_b_sq_centered.resize(k);
  f.tilde_a[0] = m(0, 0);
  f.tilde_b_sq_centered[0] = sn * (sq[0] - 1.0);
  for (std::size_t j = 2; j <= k; ++j) {
    // P_{2j-3} = P_{2r-1} with r = j - 1; P_{2j-2} = P_{2r}.
    f.tilde_a[j - 1] = sn * odd(j - 1);
    f.tilde_b_sq_centered[j - 1] = sn * even(j - 1);
  }
  return f;
}

/// Sup-over-grid errors for one matrix size: a_sup[j-1][s] is
/// max_t |a_j - a~_j| for sample s, b_sup likewise for the centred squares.
struct ApproxErrorRow {
  std::size_t n = 0;
  std::vector<std::vector<double>> a_sup;
  std::vector<std::vector<double>> b_sup;

  double median_a(std::size_t j) const { return median(a_sup[j - 1]); }
  double median_b(std::size_t j) const { return median(b_sup[j - 1]); }
};

namespace detail {

struct SampleSup {
  std::vector<double> a;
  std::vector<double> b;
};

inline SampleSup approx_error_sample(std::size_t n, std::size_t k, const TimeGrid& grid, Engine engine) {
  GbeProcess<double> proc(n + 1, std::move(engine));
  SampleSup sup{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  TridiagOptions opts;
  opts.steps = k;
  opts.check_input = false;
  opts.strategy = TridiagStrategy::deferred;
  const double sn = std::sqrt(static_cast<double>(n));
  for (std::size_t s = 0; s < grid.steps; ++s) {
    if (s > 0) proc.advance(grid.dt);
    const auto t = tridiagonalize(proc.matrix(), opts);
    const auto f = approx_entries_frame(proc.matrix(), k, false);
    for (std::size_t j = 0; j < k; ++j) {
      sup.a[j] = std::max(sup.a[j], std::abs(t.diag[j] - f.tilde_a[j]));
      const double bc = (t.offdiag[j] * t.offdiag[j] - static_cast<double>(n)) / sn;
      sup.b[j] = std::max(sup.b[j], std::abs(bc - f.tilde_b_sq_centered[j]));
    }
  }
  return sup;
}

}  // namespace detail

/// Empirical approximation error of the leading k entries for each n (the
/// matrix is (n+1) x (n+1)), using `samples` independent GOE paths.
inline std::vector<ApproxErrorRow> approx_error_study(const std::vector<std::size_t>& ns, std::size_t k,
                                                      const TimeGrid& grid, std::size_t samples, std::uint64_t seed,
                                                      const ParallelOptions& par = {}) {
  grid.validate();
  detail::require(samples >= 1, "need at least one sample");
  const SeedSplitter split(seed);
  std::vector<ApproxErrorRow> rows;
  for (std::size_t n : ns) {
    detail::require(n > 2 * k + 3, "n too small for the requested number of entries");
    auto chunks = map_chunks<std::vector<detail::SampleSup>>(samples, par, [&](std::size_t b, std::size_t e) {
      std::vector<detail::SampleSup> out;
      for (std::size_t s = b; s < e; ++s) out.push_back(detail::approx_error_sample(n, k, grid, split.engine(s, n)));
      return out;
    });
    ApproxErrorRow row{n, std::vector<std::vector<double>>(k), std::vector<std::vector<double>>(k)};
    for (const auto& c : chunks)
      for (const auto& s : c)
        for (std::size_t j = 0; j < k; ++j) {
          row.a_sup[j].push_back(s.a[j]);
          row.b_sup[j].push_back(s.b[j]);
        }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dbm
