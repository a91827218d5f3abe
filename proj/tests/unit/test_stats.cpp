// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dbm/core/rng.hpp"
#include "dbm/stats.hpp"

namespace dbm {
namespace {

TEST(Moments, ConstantStream) {
  MomentAccumulator m;
  for (int i = 0; i < 100; ++i) m.add(3.5, 3.5);
  EXPECT_EQ(m.mean_x(), 3.5);
  EXPECT_EQ(m.variance(), 0.0);
  EXPECT_EQ(m.covariance(), 0.0);
  EXPECT_THROW(m.excess_kurtosis(), ParameterError);
}

TEST(Moments, SmallSampleExact) {
  MomentAccumulator m;
  for (double x : {1.0, 2.0, 4.0, 7.0}) m.add(x, 2.0 * x + 1.0);
  EXPECT_DOUBLE_EQ(m.mean_x(), 3.5);
  EXPECT_DOUBLE_EQ(m.mean_y(), 8.0);
  EXPECT_NEAR(m.variance(), 7.0, 1e-12);
  EXPECT_NEAR(m.variance_y(), 28.0, 1e-12);
  EXPECT_NEAR(m.covariance(), 14.0, 1e-12);
  EXPECT_NEAR(m.central(3, 0), (-15.625 - 3.375 + 0.125 + 42.875) / 4.0, 1e-12);
}

TEST(Moments, InsufficientData) {
  MomentAccumulator m;
  EXPECT_THROW(m.central(2, 0), ParameterError);
  m.add(1.0);
  EXPECT_THROW(m.variance(), InsufficientData);
  m.add(2.0);
  m.add(3.0);
  EXPECT_THROW(m.excess_kurtosis(), InsufficientData);
}

TEST(Moments, GaussianKurtosisNearZero) {
  Engine e(1);
  StandardNormal normal;
  MomentAccumulator m;
  for (int i = 0; i < 1000000; ++i) m.add(normal(e));
  EXPECT_NEAR(m.excess_kurtosis(), 0.0, 3.0 * m.excess_kurtosis_se());
  EXPECT_NEAR(m.excess_kurtosis_se(), std::sqrt(24.0 / 1e6), 1e-5);
}

TEST(Moments, ChiSquareKurtosisIsTwelve) {
  Engine e(2);
  StandardNormal normal;
  std::vector<MomentAccumulator> blocks(40);
  MomentAccumulator all;
  for (int i = 0; i < 400000; ++i) {
    const double z = normal(e);
    blocks[static_cast<std::size_t>(i) % 40].add(z * z);
    all.add(z * z);
  }
  const double se = jackknife_se(blocks, [](const MomentAccumulator& a) { return a.excess_kurtosis(); });
  EXPECT_NEAR(all.excess_kurtosis(), 12.0, 4.0 * se);
  EXPECT_GT(se, all.excess_kurtosis_se());
}

TEST(Moments, MergeEqualsConcatenation) {
  Engine e(3);
  std::normal_distribution<double> d(100.0, 3.0);
  MomentAccumulator whole, left, right;
  for (int i = 0; i < 5000; ++i) {
    const double x = d(e);
    const double y = 0.5 * x + d(e);
    whole.add(x, y);
    (i < 1700 ? left : right).add(x, y);
  }
  left.merge(right);
  EXPECT_EQ(left.count(), whole.count());
  for (int p = 0; p <= 4; ++p)
    for (int q = 0; p + q <= 4; ++q)
      EXPECT_NEAR(left.central(p, q), whole.central(p, q), 1e-9 * (1.0 + std::abs(whole.central(p, q))));
  EXPECT_NEAR(left.excess_kurtosis(), whole.excess_kurtosis(), 1e-9);

  MomentAccumulator empty;
  empty.merge(whole);
  EXPECT_EQ(empty.mean_x(), whole.mean_x());
  whole.merge(MomentAccumulator{});
  EXPECT_EQ(empty.count(), whole.count());
}

TEST(Moments, ShiftedSumsStayAccurate) {
  MomentAccumulator m;
  for (int i = 0; i < 1000; ++i) m.add(1e9 + (i % 2 == 0 ? 1.0 : -1.0));
  EXPECT_NEAR(m.variance(), 1000.0 / 999.0, 1e-9);
  EXPECT_NEAR(m.excess_kurtosis(), -2.0, 0.02);
}

TEST(Moments, ThreeSigmaCoverage) {
  // Mean and covariance bands on synthetic Gaussians with known values.
  Engine e(4);
  StandardNormal normal;
  int mean_hits = 0, cov_hits = 0;
  const int reps = 2000;
  for (int r = 0; r < reps; ++r) {
    MomentAccumulator m;
    for (int i = 0; i < 400; ++i) {
      const double x = normal(e);
      m.add(x + 0.6 * normal(e), x);
    }
    if (std::abs(m.mean_x()) <= 3.0 * m.mean_se()) ++mean_hits;
    if (std::abs(m.covariance() - 1.0) <= 3.0 * m.covariance_se()) ++cov_hits;
  }
  EXPECT_GE(mean_hits, static_cast<int>(0.99 * reps));
  EXPECT_GE(cov_hits, static_cast<int>(0.99 * reps));
}

TEST(Curves, FlatWhenPathIsConstantInTime) {
  Engine e(5);
  StandardNormal normal;
  std::vector<std::vector<double>> paths;
  for (int s = 0; s < 300; ++s) paths.push_back(std::vector<double>(5, normal(e)));
  const std::vector<double> t{0, 0.1, 0.2, 0.3, 0.4};
  const auto c = covariance_curve(paths, t);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_DOUBLE_EQ(c.value[i], c.value[0]);
  EXPECT_EQ(c.t, t);
}

TEST(Curves, IndependentIncrementsGiveZero) {
  Engine e(6);
  StandardNormal normal;
  CurveAccumulator acc(4);
  for (int s = 0; s < 3000; ++s) acc.add(std::vector<double>{normal(e), normal(e), normal(e), normal(e)});
  const std::vector<double> t{0, 1, 2, 3};
  const auto c = acc.covariance(t);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(c.value[i], 0.0, 3.0 * c.se[i]);
  const auto mean = acc.mean(t);
  const auto var = acc.variance(t);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(mean.value[i], 0.0, 4.0 * mean.se[i]);
    EXPECT_NEAR(var.value[i], 1.0, 4.0 * var.se[i]);
  }
  EXPECT_THROW(covariance_curve({{1.0}}, std::vector<double>{0.0}), InsufficientData);
}

TEST(Curves, MergeMatchesSinglePass) {
  Engine e(7);
  StandardNormal normal;
  CurveAccumulator all(3), a(3), b(3);
  for (int s = 0; s < 200; ++s) {
    const std::vector<double> p{normal(e), normal(e), normal(e)};
    all.add(p);
    (s % 3 == 0 ? a : b).add(p);
  }
  a.merge(b);
  const std::vector<double> t{0, 1, 2};
  const auto x = a.covariance(t);
  const auto y = all.covariance(t);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(x.value[i], y.value[i], 1e-12);
  CurveAccumulator c;
  c.merge(all);
  EXPECT_EQ(c.count(), 200u);
}

TEST(Jackknife, MeanMatchesClassicalError) {
  Engine e(8);
  StandardNormal normal;
  std::vector<MomentAccumulator> blocks(100);
  MomentAccumulator all;
  for (int i = 0; i < 10000; ++i) {
    const double x = normal(e);
    blocks[static_cast<std::size_t>(i) / 100].add(x);
    all.add(x);
  }
  const double se = jackknife_se(blocks, [](const MomentAccumulator& a) { return a.mean_x(); });
  EXPECT_NEAR(se, all.mean_se(), 0.15 * all.mean_se());
  EXPECT_THROW(jackknife_se(std::vector<MomentAccumulator>(1), [](const MomentAccumulator&) { return 0.0; }),
               InsufficientData);
}

TEST(Quantiles, TypeSeven) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25), 2.0);
  EXPECT_DOUBLE_EQ(quantile({1.0, 2.0}, 1.0), 2.0);
  EXPECT_THROW(median({}), ParameterError);
  EXPECT_THROW(quantile({1.0}, 1.5), ParameterError);
}

TEST(IntegratedGap, Trapezoid) {
  const std::vector<double> t{0.0, 0.5, 1.0};
  EXPECT_DOUBLE_EQ(integrated_gap(t, std::vector<double>{1, 1, 1}, std::vector<double>{0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(integrated_gap(t, std::vector<double>{0, 1, 2}, std::vector<double>{0, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(integrated_gap(t, std::vector<double>{1, 0, 1}, std::vector<double>{0, 1, 0}), 1.0);
  EXPECT_THROW(integrated_gap(t, std::vector<double>{1}, std::vector<double>{0, 0, 0}), ParameterError);
}

}  // namespace
}  // namespace dbm
