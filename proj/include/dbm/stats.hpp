// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Across-sample estimators: moments up to order four of a value x and its
// reference y (usually the same process at t = 0), with standard errors.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dbm/core/error.hpp"

namespace dbm {

/// One-pass accumulator of shifted power sums S[p][q] = sum (x - kx)^p (y - ky)^q
/// for p, q <= 4. The shift is the first observation, which keeps the sums
/// well conditioned; merge re-expands the other side around this shift.
class MomentAccumulator {
 public:
  static constexpr int kOrder = 4;

  void add(double x) { add(x, x); }

  void add(double x, double y) {
    if (n_ == 0) {
      kx_ = x;
      ky_ = y;
    }
    ++n_;
    const double u = x - kx_;
    const double v = y - ky_;
    std::array<double, kOrder + 1> up{};
    std::array<double, kOrder + 1> vp{};
    up[0] = vp[0] = 1.0;
    for (int p = 1; p <= kOrder; ++p) {
      up[p] = up[p - 1] * u;
      vp[p] = vp[p - 1] * v;
    }
    for (int p = 0; p <= kOrder; ++p)
      for (int q = 0; q <= kOrder; ++q) s_[p][q] += up[p] * vp[q];
  }

  void merge(const MomentAccumulator& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
      *this = o;
      return;
    }
    const double dx = o.kx_ - kx_;
    const double dy = o.ky_ - ky_;
    const auto shifted = o.expanded(dx, dy);
    for (int p = 0; p <= kOrder; ++p)
      for (int q = 0; q <= kOrder; ++q) s_[p][q] += shifted[p][q];
    n_ += o.n_;
  }

  std::size_t count() const { return n_; }

  double mean_x() const { return kx_ + raw(1, 0); }
  double mean_y() const { return ky_ + raw(0, 1); }

  /// (1/n) sum (x - mean_x)^p (y - mean_y)^q.
  double central(int p, int q) const {
    detail::require(n_ > 0, "no observations");
    const auto c = expanded(-raw(1, 0), -raw(0, 1));
    return c[p][q] / static_cast<double>(n_);
  }

  double variance() const {
    need(2);
    return central(2, 0) * nd() / (nd() - 1.0);
  }
  double variance_y() const {
    need(2);
    return central(0, 2) * nd() / (nd() - 1.0);
  }
  double covariance() const {
    need(2);
    return central(1, 1) * nd() / (nd() - 1.0);
  }

  double mean_se() const { return std::sqrt(variance() / nd()); }

  double variance_se() const {
    need(2);
    const double m2 = central(2, 0);
    return std::sqrt(std::max(0.0, central(4, 0) - m2 * m2) / nd());
  }

  double covariance_se() const {
    need(2);
    const double c = central(1, 1);
    return std::sqrt(std::max(0.0, central(2, 2) - c * c) / nd());
  }

  /// Sample excess kurtosis G2 = ((n + 1) g2 + 6)(n - 1) / ((n - 2)(n - 3)).
  double excess_kurtosis() const {
    need(4);
    const double m2 = central(2, 0);
    detail::require(m2 > 0.0, "kurtosis of a constant stream is undefined");
    const double g2 = central(4, 0) / (m2 * m2) - 3.0;
    const double n = nd();
    return ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
  }

  /// Standard error of G2 under normality.
  double excess_kurtosis_se() const {
    need(4);
    const double n = nd();
    return std::sqrt(24.0 * n * (n - 1.0) * (n - 1.0) / ((n - 3.0) * (n - 2.0) * (n + 3.0) * (n + 5.0)));
  }

 private:
  using Sums = std::array<std::array<double, kOrder + 1>, kOrder + 1>;

  double nd() const { return static_cast<double>(n_); }
  double raw(int p, int q) const { return n_ == 0 ? 0.0 : s_[p][q] / nd(); }

  void need(std::size_t m) const {
    if (n_ < m) throw InsufficientData("need at least " + std::to_string(m) + " samples, have " + std::to_string(n_));
  }

  /// Sums of (u + dx)^p (v + dy)^q given the sums of u^a v^b.
  Sums expanded(double dx, double dy) const {
    static constexpr std::array<std::array<double, kOrder + 1>, kOrder + 1> binom = {{
        {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}}};
    std::array<double, kOrder + 1> dxp{};
    std::array<double, kOrder + 1> dyp{};
    dxp[0] = dyp[0] = 1.0;
    for (int p = 1; p <= kOrder; ++p) {
      dxp[p] = dxp[p - 1] * dx;
      dyp[p] = dyp[p - 1] * dy;
    }
    Sums out{};
    for (int p = 0; p <= kOrder; ++p)
      for (int q = 0; q <= kOrder; ++q) {
        double acc = 0.0;
        for (int a = 0; a <= p; ++a)
          for (int b = 0; b <= q; ++b) acc += binom[p][a] * binom[q][b] * dxp[p - a] * dyp[q - b] * s_[a][b];
        out[p][q] = acc;
      }
    return out;
  }

  std::size_t n_ = 0;
  double kx_ = 0.0;
  double ky_ = 0.0;
  Sums s_{};
};

/// An estimate per grid time with its standard error.
struct Curve {
  std::string series;
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> se;
};

/// Per-time accumulators for paths X(t_0..t_m), each paired with X(t_0).
class CurveAccumulator {
 public:
  CurveAccumulator() = default;
  explicit CurveAccumulator(std::size_t steps) : acc_(steps) {}

  std::size_t steps() const { return acc_.size(); }
  std::size_t count() const { return acc_.empty() ? 0 : acc_.front().count(); }
  const MomentAccumulator& at(std::size_t i) const { return acc_[i]; }

  void add(std::span<const double> path) {
    detail::expect(path.size() == acc_.size(), "path length differs from accumulator grid");
    for (std::size_t i = 0; i < path.size(); ++i) acc_[i].add(path[i], path[0]);
  }

  void merge(const CurveAccumulator& o) {
    if (acc_.empty()) {
      acc_ = o.acc_;
      return;
    }
    detail::expect(o.acc_.empty() || o.acc_.size() == acc_.size(), "accumulator grids differ");
    for (std::size_t i = 0; i < o.acc_.size(); ++i) acc_[i].merge(o.acc_[i]);
  }

  Curve covariance(std::span<const double> t, std::string series = "cov") const {
    return build(t, std::move(series), &MomentAccumulator::covariance, &MomentAccumulator::covariance_se);
  }
  Curve mean(std::span<const double> t, std::string series = "mean") const {
    return build(t, std::move(series), &MomentAccumulator::mean_x, &MomentAccumulator::mean_se);
  }
  Curve variance(std::span<const double> t, std::string series = "var") const {
    return build(t, std::move(series), &MomentAccumulator::variance, &MomentAccumulator::variance_se);
  }

 private:
  Curve build(std::span<const double> t, std::string series, double (MomentAccumulator::*v)() const,
              double (MomentAccumulator::*err)() const) const {
    detail::expect(t.size() == acc_.size(), "time axis differs from accumulator grid");
    Curve c{std::move(series), {t.begin(), t.end()}, {}, {}};
    for (const auto& a : acc_) {
      c.value.push_back((a.*v)());
      c.se.push_back((a.*err)());
    }
    return c;
  }

  std::vector<MomentAccumulator> acc_;
};

/// Cov(X(t_0), X(t_i)) over sample paths with plug-in standard errors.
inline Curve covariance_curve(const std::vector<std::vector<double>>& paths, std::span<const double> t) {
  if (paths.size() < 2) throw InsufficientData("covariance curve needs at least 2 sample paths");
  CurveAccumulator acc(t.size());
  for (const auto& p : paths) acc.add(p);
  return acc.covariance(t);
}

/// Delete-one-block jackknife standard error of stat over the union of blocks.
template <class Acc, class Stat>
double jackknife_se(const std::vector<Acc>& blocks, Stat&& stat) {
  const std::size_t g = blocks.size();
  if (g < 2) throw InsufficientData("jackknife needs at least 2 blocks");
  std::vector<Acc> prefix(g + 1);
  std::vector<Acc> suffix(g + 1);
  for (std::size_t i = 0; i < g; ++i) {
    prefix[i + 1] = prefix[i];
    prefix[i + 1].merge(blocks[i]);
  }
  for (std::size_t i = g; i-- > 0;) {
    suffix[i] = suffix[i + 1];
    suffix[i].merge(blocks[i]);
  }
  std::vector<double> loo(g);
  double mean = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    Acc a = prefix[i];
    a.merge(suffix[i + 1]);
    loo[i] = stat(a);
    mean += loo[i];
  }
  mean /= static_cast<double>(g);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(g - 1) / static_cast<double>(g));
}

/// Linear-interpolation quantile (type 7) of a copy of the data.
inline double quantile(std::vector<double> v, double p) {
  detail::require(!v.empty(), "quantile of empty data");
  detail::require(p >= 0.0 && p <= 1.0, "quantile level must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

inline double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

/// Trapezoid integral of |f - g| on a shared axis.
inline double integrated_gap(std::span<const double> t, std::span<const double> f, std::span<const double> g) {
  detail::require(t.size() == f.size() && t.size() == g.size(), "curves must share one axis");
  double s = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    s += 0.5 * (t[i] - t[i - 1]) * (std::abs(f[i] - g[i]) + std::abs(f[i - 1] - g[i - 1]));
  return s;
}

}  // namespace dbm
