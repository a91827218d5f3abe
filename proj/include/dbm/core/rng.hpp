// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace dbm {

using Engine = std::mt19937_64;

/// Derives independent engines from a master seed. The engine for
/// (sample, stream) depends only on those two counters, never on which
/// worker thread draws it or in what order.
class SeedSplitter {
 public:
  explicit SeedSplitter(std::uint64_t master) : master_(master) {}

  std::uint64_t master() const { return master_; }

  Engine engine(std::uint64_t sample, std::uint64_t stream = 0) const {
    std::seed_seq seq{lo(master_), hi(master_), lo(sample), hi(sample), lo(stream), hi(stream)};
    return Engine(seq);
  }

  /// A derived 64-bit seed, usable as the master of a nested splitter.
  std::uint64_t child(std::uint64_t sample, std::uint64_t stream = 0) const {
    Engine e = engine(sample, stream);
    return e();
  }

 private:
  static std::uint32_t lo(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
  static std::uint32_t hi(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

  std::uint64_t master_;
};

/// Standard normal variates (ziggurat).
class StandardNormal {
 public:
  double operator()(Engine& engine) { return dist_(engine); }

 private:
  boost::random::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace dbm
