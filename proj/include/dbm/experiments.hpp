// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Monte Carlo studies over sample paths of the tridiagonalized GbE process
// and its limit model. Every study splits one master seed per sample, runs
// samples in fixed chunks and merges the chunk accumulators in chunk order,
// so results depend on (config, seed, chunk size) only.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dbm/combinatorics.hpp"
#include "dbm/core/parallel.hpp"
#include "dbm/core/rng.hpp"
#include "dbm/limit_model.hpp"
#include "dbm/process.hpp"
#include "dbm/spectral.hpp"
#include "dbm/stats.hpp"
#include "dbm/tridiag.hpp"

namespace dbm {

/// Engine streams per sample. A study that draws both a matrix path and a
/// limit-model path for sample s uses (s, kMatrixStream) and (s, kLimitStream).
inline constexpr std::uint64_t kMatrixStream = 0;
inline constexpr std::uint64_t kLimitStream = 1;

namespace detail {

template <class Acc, class Fn>
Acc reduce_samples(std::size_t samples, const ParallelOptions& par, const Acc& init, Fn&& fn) {
  auto parts = map_chunks<Acc>(samples, par, [&](std::size_t b, std::size_t e) {
    Acc acc = init;
    for (std::size_t s = b; s < e; ++s) fn(acc, s);
    return acc;
  });
  Acc total = init;
  for (const auto& p : parts) total.merge(p);
  return total;
}

inline std::vector<CurveAccumulator> curve_bank(std::size_t count, std::size_t steps) {
  return std::vector<CurveAccumulator>(count, CurveAccumulator(steps));
}

inline void merge_bank(std::vector<CurveAccumulator>& into, const std::vector<CurveAccumulator>& from) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i].merge(from[i]);
}

inline std::vector<double> grid_times(const TimeGrid& grid) {
  std::vector<double> t(grid.steps);
  for (std::size_t i = 0; i < grid.steps; ++i) t[i] = grid.time(i);
  return t;
}

}  // namespace detail

/// Per-entry curve accumulators for the leading entries of the
/// tridiagonalized n x n GbE process. a[j-1] tracks a_j, b[j-1] tracks b_j
/// and b_sq[j-1] tracks b_j^2.
struct EntryStudy {
  TimeGrid grid;
  std::size_t n = 0;
  int beta = 1;
  std::vector<CurveAccumulator> a;
  std::vector<CurveAccumulator> b;
  std::vector<CurveAccumulator> b_sq;

  std::vector<double> times() const { return detail::grid_times(grid); }

  void merge(const EntryStudy& o) {
    detail::merge_bank(a, o.a);
    detail::merge_bank(b, o.b);
    detail::merge_bank(b_sq, o.b_sq);
  }
};

namespace detail {

template <GbeField F>
void entry_sample(EntryStudy& acc, std::size_t steps, Engine engine) {
  const TimeGrid& g = acc.grid;
  GbeProcess<F> proc(acc.n, std::move(engine));
  TridiagOptions opts;
  opts.steps = steps;
  opts.check_input = false;
  const std::size_t ka = acc.a.size();
  const std::size_t kb = acc.b.size();
  std::vector<std::vector<double>> pa(ka, std::vector<double>(g.steps));
  std::vector<std::vector<double>> pb(kb, std::vector<double>(g.steps));
  for (std::size_t s = 0; s < g.steps; ++s) {
    if (s > 0) proc.advance(g.dt);
    const auto t = tridiagonalize(proc.matrix(), opts);
    for (std::size_t j = 0; j < ka; ++j) pa[j][s] = t.diag[j];
    for (std::size_t j = 0; j < kb; ++j) pb[j][s] = t.offdiag[j];
  }
  for (std::size_t j = 0; j < ka; ++j) acc.a[j].add(pa[j]);
  for (std::size_t j = 0; j < kb; ++j) {
    acc.b[j].add(pb[j]);
    for (double& v : pb[j]) v *= v;
    acc.b_sq[j].add(pb[j]);
  }
}

}  // namespace detail

/// Samples `samples` paths of the n x n GbE process on `grid` and records the
/// first k diagonal and off-diagonal entries of each tridiagonalized frame
/// (k <= n, with b_j recorded for j <= min(k, n - 1)).
inline EntryStudy simulate_entries(std::size_t n, int beta, std::size_t k, const TimeGrid& grid, std::size_t samples,
                                   std::uint64_t seed, const ParallelOptions& par = {}) {
  validate_beta(beta);
  grid.validate();
  detail::require(n >= 1, "matrix size must be >= 1");
  detail::require(k >= 1 && k <= n, "entry count k must satisfy 1 <= k <= n");
  detail::require(samples >= 2, "need at least 2 samples");
  const std::size_t steps = std::min(k, n - 1);
  const std::size_t kb = std::min(k, n - 1);
  EntryStudy init{grid, n, beta, detail::curve_bank(k, grid.steps), detail::curve_bank(kb, grid.steps),
                  detail::curve_bank(kb, grid.steps)};
  const SeedSplitter split(seed);
  return detail::reduce_samples(samples, par, init, [&](EntryStudy& acc, std::size_t s) {
    dispatch_beta(beta, [&]<class F>() { detail::entry_sample<F>(acc, steps, split.engine(s, kMatrixStream)); });
  });
}

/// Curve accumulators for the limit processes A_j, B_j, j <= k.
struct LimitStudy {
  TimeGrid grid;
  std::vector<CurveAccumulator> a;
  std::vector<CurveAccumulator> b;

  std::vector<double> times() const { return detail::grid_times(grid); }

  void merge(const LimitStudy& o) {
    detail::merge_bank(a, o.a);
    detail::merge_bank(b, o.b);
  }
};

inline LimitStudy simulate_limit(std::size_t k, const TimeGrid& grid, std::size_t samples, std::uint64_t seed,
                                 const ParallelOptions& par = {}) {
  grid.validate();
  detail::require(k >= 1, "entry count k must be >= 1");
  detail::require(samples >= 2, "need at least 2 samples");
  LimitStudy init{grid, detail::curve_bank(k, grid.steps), detail::curve_bank(k, grid.steps)};
  const SeedSplitter split(seed);
  return detail::reduce_samples(samples, par, init, [&](LimitStudy& acc, std::size_t s) {
    Engine e = split.engine(s, kLimitStream);
    const auto lim = limit_entries_sample(k, grid, e);
    for (std::size_t j = 0; j < k; ++j) {
      acc.a[j].add(lim.a[j].values);
      acc.b[j].add(lim.b[j].values);
    }
  });
}

/// b_hat_j = sqrt(beta m + sqrt(beta m) B_j) with m = n - j, so that its mean
/// tracks E b_j = E chi_{beta(n-j)}. Samples whose radicand is not positive
/// somewhere on the grid are dropped and counted.
struct BhatStudy {
  TimeGrid grid;
  std::size_t n = 0;
  std::size_t j = 0;
  int beta = 1;
  CurveAccumulator bhat;
  std::size_t excluded = 0;

  std::vector<double> times() const { return detail::grid_times(grid); }

  void merge(const BhatStudy& o) {
    bhat.merge(o.bhat);
    excluded += o.excluded;
  }
};

inline BhatStudy simulate_bhat(std::size_t n, std::size_t j, int beta, const TimeGrid& grid, std::size_t samples,
                               std::uint64_t seed, const ParallelOptions& par = {}) {
  validate_beta(beta);
  grid.validate();
  detail::require(j >= 1 && j < n, "off-diagonal index must satisfy 1 <= j < n");
  detail::require(samples >= 2, "need at least 2 samples");
  BhatStudy init{grid, n, j, beta, CurveAccumulator(grid.steps), 0};
  const SeedSplitter split(seed);
  const double rate = LimitEntryProcesses::b_rate(j);
  const double m = static_cast<double>(n - j);
  return detail::reduce_samples(samples, par, init, [&](BhatStudy& acc, std::size_t s) {
    Engine e = split.engine(s, kLimitStream);
    OuPath b = ou_sample_path(OuParams{rate}, grid, e);
    for (double& v : b.values) v *= std::sqrt(2.0);
    if (const auto h = bhat_transform(b, m, beta)) {
      acc.bhat.add(h->values);
    } else {
      ++acc.excluded;
    }
  });
}

/// Excess kurtosis of a_j(0) + a_j(t) over the grid for one (n, j).
struct KurtosisCurve {
  std::size_t n = 0;
  std::size_t j = 0;
  std::vector<double> t;
  std::vector<double> value;
  /// Standard error under normality.
  std::vector<double> se_normal;
  /// Delete-one-block jackknife standard error.
  std::vector<double> se_jackknife;

  /// The larger of the two error estimates.
  double se(std::size_t i) const { return std::max(se_normal[i], se_jackknife[i]); }
};

/// For each n and each j in js, the curve t -> G2(a_j(0) + a_j(t)) of the
/// tridiagonalized n x n GOE process. One matrix path per sample serves
/// all js. Jackknife blocks are consecutive runs of sample chunks.
inline std::vector<KurtosisCurve> kurtosis_sum_experiment(const std::vector<std::size_t>& ns,
                                                          const std::vector<std::size_t>& js, const TimeGrid& grid,
                                                          std::size_t samples, std::uint64_t seed,
                                                          const ParallelOptions& par = {}, std::size_t blocks = 50) {
  grid.validate();
  detail::require(!js.empty(), "need at least one entry index");
  detail::require(samples >= 8, "kurtosis needs at least 8 samples");
  detail::require(blocks >= 2, "jackknife needs at least 2 blocks");
  const std::size_t jmax = *std::max_element(js.begin(), js.end());
  for (std::size_t j : js) detail::require(j >= 1, "entry index j must be >= 1");
  const SeedSplitter split(seed);
  const auto t = detail::grid_times(grid);
  const std::size_t width = js.size() * grid.steps;

  std::vector<KurtosisCurve> out;
  for (std::size_t n : ns) {
    detail::require(n >= jmax, "matrix size must be at least the largest entry index");
    TridiagOptions opts;
    opts.steps = jmax - 1;
    opts.check_input = false;
    auto parts = map_chunks<std::vector<MomentAccumulator>>(samples, par, [&](std::size_t b, std::size_t e) {
      std::vector<MomentAccumulator> acc(width);
      std::vector<double> a0(js.size());
      for (std::size_t s = b; s < e; ++s) {
        GbeProcess<double> proc(n, split.engine(s, n));
        for (std::size_t i = 0; i < grid.steps; ++i) {
          if (i > 0) proc.advance(grid.dt);
          const auto tri = tridiagonalize(proc.matrix(), opts);
          for (std::size_t q = 0; q < js.size(); ++q) {
            const double v = tri.diag[js[q] - 1];
            if (i == 0) a0[q] = v;
            acc[q * grid.steps + i].add(a0[q] + v);
          }
        }
      }
      return acc;
    });

    const std::size_t g = std::min(blocks, parts.size());
    std::vector<std::vector<MomentAccumulator>> grouped(g, std::vector<MomentAccumulator>(width));
    for (std::size_t c = 0; c < parts.size(); ++c)
      for (std::size_t w = 0; w < width; ++w) grouped[c * g / parts.size()][w].merge(parts[c][w]);

    for (std::size_t q = 0; q < js.size(); ++q) {
      KurtosisCurve curve{n, js[q], t, {}, {}, {}};
      for (std::size_t i = 0; i < grid.steps; ++i) {
        const std::size_t w = q * grid.steps + i;
        std::vector<MomentAccumulator> col(g);
        MomentAccumulator all;
        for (std::size_t bl = 0; bl < g; ++bl) {
          col[bl] = grouped[bl][w];
          all.merge(col[bl]);
        }
        curve.value.push_back(all.excess_kurtosis());
        curve.se_normal.push_back(all.excess_kurtosis_se());
        curve.se_jackknife.push_back(
            g >= 2 ? jackknife_se(col, [](const MomentAccumulator& a) { return a.excess_kurtosis(); }) : 0.0);
      }
      out.push_back(std::move(curve));
    }
  }
  return out;
}

/// Largest-eigenvalue processes: (i) the full n x n GbE process, (ii) the
/// k x k corner of the limit model, (iii) the k x k corner of the
/// tridiagonalized process. limit[q] and tridiag[q] belong to ks[q].
struct EigenCovStudy {
  TimeGrid grid;
  std::size_t n = 0;
  int beta = 1;
  std::vector<std::size_t> ks;
  CurveAccumulator full;
  std::vector<CurveAccumulator> limit;
  std::vector<CurveAccumulator> tridiag;
  /// Limit-model samples dropped per k for a non-positive b_hat radicand.
  std::vector<std::size_t> excluded;

  std::vector<double> times() const { return detail::grid_times(grid); }

  void merge(const EigenCovStudy& o) {
    full.merge(o.full);
    detail::merge_bank(limit, o.limit);
    detail::merge_bank(tridiag, o.tridiag);
    for (std::size_t q = 0; q < excluded.size(); ++q) excluded[q] += o.excluded[q];
  }
};

/// The k x k limit-model corner at grid step s: diagonal A_1..A_k and
/// off-diagonal b_hat_j with centring n - j. Returns false if a radicand
/// is not positive.
inline bool limit_corner(const LimitEntryProcesses& lim, std::size_t s, std::size_t k, std::size_t n, int beta,
                         SymTridiagonal& out) {
  detail::require(k <= lim.k && k < n, "corner exceeds the sampled limit model");
  out.diag.resize(k);
  out.offdiag.resize(k - 1);
  for (std::size_t j = 0; j < k; ++j) out.diag[j] = lim.a[j].values[s];
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double bm = static_cast<double>(beta) * static_cast<double>(n - j - 1);
    const double r = bm + std::sqrt(bm) * lim.b[j].values[s];
    if (!(r > 0.0)) return false;
    out.offdiag[j] = std::sqrt(r);
  }
  return true;
}

namespace detail {

template <GbeField F>
void eigen_cov_sample(EigenCovStudy& acc, const SeedSplitter& split, std::size_t s) {
  const TimeGrid& g = acc.grid;
  const std::size_t nk = acc.ks.size();
  const std::size_t kmax = *std::max_element(acc.ks.begin(), acc.ks.end());
  std::vector<double> full(g.steps);
  std::vector<std::vector<double>> tri(nk, std::vector<double>(g.steps));
  std::vector<std::vector<double>> lim(nk, std::vector<double>(g.steps));

  GbeProcess<F> proc(acc.n, split.engine(s, kMatrixStream));
  TridiagOptions opts;
  opts.check_input = false;
  for (std::size_t i = 0; i < g.steps; ++i) {
    if (i > 0) proc.advance(g.dt);
    const auto t = tridiagonalize(proc.matrix(), opts);
    full[i] = lambda_max(t);
    for (std::size_t q = 0; q < nk; ++q) tri[q][i] = lambda_max(corner(t, acc.ks[q]));
  }

  Engine e = split.engine(s, kLimitStream);
  const auto model = limit_entries_sample(kmax, g, e);
  SymTridiagonal c;
  std::vector<bool> ok(nk, true);
  for (std::size_t q = 0; q < nk; ++q)
    for (std::size_t i = 0; i < g.steps && ok[q]; ++i) {
      ok[q] = limit_corner(model, i, acc.ks[q], acc.n, acc.beta, c);
      if (ok[q]) lim[q][i] = lambda_max(c);
    }

  acc.full.add(full);
  for (std::size_t q = 0; q < nk; ++q) {
    acc.tridiag[q].add(tri[q]);
    if (ok[q]) {
      acc.limit[q].add(lim[q]);
    } else {
      ++acc.excluded[q];
    }
  }
}

}  // namespace detail

inline EigenCovStudy eigen_cov_experiment(std::size_t n, int beta, const std::vector<std::size_t>& ks,
                                          const TimeGrid& grid, std::size_t samples, std::uint64_t seed,
                                          const ParallelOptions& par = {}) {
  validate_beta(beta);
  grid.validate();
  detail::require(!ks.empty(), "need at least one corner size");
  for (std::size_t k : ks) detail::require(k >= 1 && k < n, "corner size must satisfy 1 <= k < n");
  detail::require(samples >= 2, "need at least 2 samples");
  const std::size_t nk = ks.size();
  EigenCovStudy init{grid,
                     n,
                     beta,
                     ks,
                     CurveAccumulator(grid.steps),
                     detail::curve_bank(nk, grid.steps),
                     detail::curve_bank(nk, grid.steps),
                     std::vector<std::size_t>(nk, 0)};
  const SeedSplitter split(seed);
  return detail::reduce_samples(samples, par, init, [&](EigenCovStudy& acc, std::size_t s) {
    dispatch_beta(beta, [&]<class F>() { detail::eigen_cov_sample<F>(acc, split, s); });
  });
}

/// (1/n) Tr(P_j(X(0)/sqrt n) P_k(X(lag)/sqrt n)) for the n x n GOE process,
/// against the leading-order value delta_jk exp(-k lag).
struct MomentCheckEntry {
  std::size_t j = 0;
  std::size_t k = 0;
  double value = 0.0;
  double se = 0.0;
  double oracle = 0.0;
};

struct MomentCheck {
  std::size_t n = 0;
  double lag = 0.0;
  std::size_t samples = 0;
  std::vector<MomentCheckEntry> entries;
};

namespace detail {

/// P_0..P_jmax of x, dense.
inline std::vector<Eigen::MatrixXd> dense_poly_sequence(const Eigen::MatrixXd& x, std::size_t jmax) {
  std::vector<Eigen::MatrixXd> p;
  p.reserve(jmax + 1);
  p.push_back(Eigen::MatrixXd::Identity(x.rows(), x.cols()));
  if (jmax >= 1) p.push_back(x);
  for (std::size_t m = 1; m < jmax; ++m) {
    Eigen::MatrixXd next = x * p[m];
    next -= p[m - 1];
    p.push_back(std::move(next));
  }
  return p;
}

inline Eigen::MatrixXd scaled_copy(const DenseMatrix<double>& m, double scale) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) / scale;
  return out;
}

}  // namespace detail

inline MomentCheck moment_check(std::size_t n, std::size_t jmax, double lag, std::size_t samples, std::uint64_t seed,
                                const ParallelOptions& par = {}) {
  detail::require(n >= 2, "matrix size must be >= 2");
  detail::require(jmax >= 1, "polynomial degree must be >= 1");
  detail::require(lag >= 0.0 && std::isfinite(lag), "lag must be non-negative");
  detail::require(samples >= 2, "need at least 2 samples");
  const SeedSplitter split(seed);
  const double sn = std::sqrt(static_cast<double>(n));
  const double nd = static_cast<double>(n);

  struct Acc {
    std::vector<MomentAccumulator> m;
    void merge(const Acc& o) {
      for (std::size_t i = 0; i < m.size(); ++i) m[i].merge(o.m[i]);
    }
  };
  Acc init{std::vector<MomentAccumulator>(jmax * jmax)};
  const Acc total = detail::reduce_samples(samples, par, init, [&](Acc& acc, std::size_t s) {
    GbeProcess<double> proc(n, split.engine(s, kMatrixStream));
    const auto p0 = detail::dense_poly_sequence(detail::scaled_copy(proc.matrix(), sn), jmax);
    proc.advance(lag);
    const auto p1 = detail::dense_poly_sequence(detail::scaled_copy(proc.matrix(), sn), jmax);
    for (std::size_t j = 1; j <= jmax; ++j)
      for (std::size_t k = 1; k <= jmax; ++k)
        acc.m[(j - 1) * jmax + (k - 1)].add(p0[j].cwiseProduct(p1[k]).sum() / nd);
  });

  MomentCheck out{n, lag, samples, {}};
  for (std::size_t j = 1; j <= jmax; ++j)
    for (std::size_t k = 1; k <= jmax; ++k) {
      const auto& a = total.m[(j - 1) * jmax + (k - 1)];
      out.entries.push_back({j, k, a.mean_x(), a.mean_se(), semicircular_cov_p(j, k, 0.0, lag)});
    }
  return out;
}

}  // namespace dbm
