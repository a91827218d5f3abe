// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Pair partitions, non-crossing pairings and the leading-order moment
// formulas they produce for the approximate entries.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dbm/chebyshev.hpp"
#include "dbm/core/error.hpp"

namespace dbm {

inline constexpr std::size_t kMaxNc2Ground = 16;
inline constexpr std::size_t kMaxP2Ground = 12;

/// Perfect matching of a finite ground set. Each block is stored with its
/// smaller element first and blocks are sorted, so equal partitions compare
/// equal.
template <class T>
struct PairPartition {
  std::vector<std::pair<T, T>> pairs;

  void normalize() {
    for (auto& p : pairs)
      if (p.second < p.first) std::swap(p.first, p.second);
    std::sort(pairs.begin(), pairs.end());
  }

  /// Partner of x; throws if x is not covered.
  T partner(const T& x) const {
    for (const auto& [a, b] : pairs) {
      if (a == x) return b;
      if (b == x) return a;
    }
    detail::expect(false, "element not covered by the pairing");
    return x;
  }

  friend bool operator==(const PairPartition&, const PairPartition&) = default;
  friend bool operator<(const PairPartition& a, const PairPartition& b) { return a.pairs < b.pairs; }
};

using IndexPairing = PairPartition<int>;

/// True if two blocks {a < c}, {b < d} interleave as a < b < c < d.
inline bool is_non_crossing(const IndexPairing& pi) {
  for (const auto& [a, c] : pi.pairs)
    for (const auto& [b, d] : pi.pairs)
      if (a < b && b < c && c < d) return false;
  return true;
}

namespace detail {

template <class T>
void enumerate_pairings(std::vector<T>& rest, std::vector<std::pair<T, T>>& acc,
                        std::vector<PairPartition<T>>& out) {
  if (rest.empty()) {
    PairPartition<T> p{acc};
    p.normalize();
    out.push_back(std::move(p));
    return;
  }
  const T first = rest.front();
  for (std::size_t i = 1; i < rest.size(); ++i) {
    std::vector<T> next;
    next.reserve(rest.size() - 2);
    for (std::size_t r = 1; r < rest.size(); ++r)
      if (r != i) next.push_back(rest[r]);
    acc.emplace_back(first, rest[i]);
    enumerate_pairings(next, acc, out);
    acc.pop_back();
  }
}

/// Non-crossing pairings of the contiguous range [lo, hi).
inline std::vector<std::vector<std::pair<int, int>>> nc2_range(int lo, int hi) {
  if (lo >= hi) return {{}};
  std::vector<std::vector<std::pair<int, int>>> out;
  for (int m = lo + 1; m < hi; m += 2) {
    const auto inner = nc2_range(lo + 1, m);
    const auto outer = nc2_range(m + 1, hi);
    for (const auto& in : inner)
      for (const auto& ou : outer) {
        std::vector<std::pair<int, int>> p{{lo, m}};
        p.insert(p.end(), in.begin(), in.end());
        p.insert(p.end(), ou.begin(), ou.end());
        out.push_back(std::move(p));
      }
  }
  return out;
}

}  // namespace detail

/// All pair partitions of `ground`; (|S| - 1)!! of them, none if |S| is odd.
template <class T>
std::vector<PairPartition<T>> enumerate_p2(std::vector<T> ground) {
  detail::require(ground.size() <= kMaxP2Ground, "pair partition enumeration is capped at 12 elements");
  std::sort(ground.begin(), ground.end());
  detail::require(std::adjacent_find(ground.begin(), ground.end()) == ground.end(), "ground set has repeated elements");
  std::vector<PairPartition<T>> out;
  if (ground.size() % 2 == 1) return out;
  std::vector<std::pair<T, T>> acc;
  detail::enumerate_pairings(ground, acc, out);
  return out;
}

/// Non-crossing pair partitions of {1..n}.
inline std::vector<IndexPairing> enumerate_nc2(std::size_t n) {
  detail::require(n <= kMaxNc2Ground, "non-crossing enumeration is capped at 16 elements");
  std::vector<IndexPairing> out;
  if (n % 2 == 1) return out;
  for (auto& p : detail::nc2_range(1, static_cast<int>(n) + 1)) {
    IndexPairing pi{std::move(p)};
    pi.normalize();
    out.push_back(std::move(pi));
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::uint64_t catalan(std::size_t m) {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

inline std::uint64_t double_factorial(std::int64_t n) {
  std::uint64_t r = 1;
  for (std::int64_t i = n; i > 1; i -= 2) r *= static_cast<std::uint64_t>(i);
  return r;
}

/// Number of blocks of pi over {1..j+k} joining {1..j} to {j+1..j+k}.
inline std::size_t straddle_count(const IndexPairing& pi, std::size_t j) {
  const int split = static_cast<int>(j);
  std::size_t s = 0;
  for (const auto& [a, b] : pi.pairs)
    if ((a <= split) != (b <= split)) ++s;
  return s;
}

/// Product over blocks of 1 (same side of the j | k split) or e^{-|t1 - t2|}.
inline double kappa_weight(const IndexPairing& pi, std::size_t j, std::size_t k, double t1, double t2) {
  detail::require(pi.pairs.size() * 2 == j + k, "pairing must cover {1..j+k}");
  return std::exp(-std::abs(t1 - t2) * static_cast<double>(straddle_count(pi, j)));
}

/// A power M(t)^degree inside a trace word.
struct WordLetter {
  std::size_t degree = 0;
  double time = 0.0;
};

/// Leading-order (1/n) E Tr of the product of (M~(t_i)/sqrt n)^{d_i}: the sum
/// over non-crossing pairings of the expanded word of prod e^{-|t - t'|}.
inline double semicircular_mixed_moment(std::span<const WordLetter> word) {
  std::vector<double> times;
  for (const auto& l : word) times.insert(times.end(), l.degree, l.time);
  if (times.size() % 2 == 1) return 0.0;
  double total = 0.0;
  for (const auto& pi : enumerate_nc2(times.size())) {
    double w = 1.0;
    for (const auto& [a, b] : pi.pairs) w *= std::exp(-std::abs(times[a - 1] - times[b - 1]));
    total += w;
  }
  return total;
}

/// Leading order of (1/n) E Tr P_j(M~(t1)/sqrt n) P_k(M~(t2)/sqrt n) as an
/// integer polynomial in q = e^{-|t1 - t2|}; coefficient l of the monomial
/// product x^a x^b is the number C of NC_2[a + b] pairings with l straddling
/// blocks.
inline IntPoly semicircular_cov_poly(std::size_t j, std::size_t k) {
  const IntPoly pj = poly_p(j);
  const IntPoly pk = poly_p(k);
  detail::require(j + k <= kMaxNc2Ground, "moment word too long for exact enumeration");
  IntPoly total;
  for (std::size_t a = 0; a < pj.coeffs.size(); ++a) {
    if (pj.coeffs[a] == 0) continue;
    for (std::size_t b = 0; b < pk.coeffs.size(); ++b) {
      if (pk.coeffs[b] == 0 || (a + b) % 2 == 1) continue;
      std::vector<std::int64_t> counts(std::min(a, b) + 1, 0);
      for (const auto& pi : enumerate_nc2(a + b)) ++counts[straddle_count(pi, a)];
      total = total + IntPoly({pj.coeffs[a] * pk.coeffs[b]}) * IntPoly(counts);
    }
  }
  return total;
}

inline double semicircular_cov_p(std::size_t j, std::size_t k, double t1, double t2) {
  return semicircular_cov_poly(j, k)(std::exp(-std::abs(t1 - t2)));
}

/// Element (side, index) of the doubled index set {1, 2} x J.
using Slot = std::pair<int, int>;
using SlotPairing = PairPartition<Slot>;

/// Disjoint cycles of a permutation of J, each starting at its least element.
struct PermutationCycles {
  std::vector<std::vector<int>> cycles;

  std::map<int, int> as_map() const {
    std::map<int, int> m;
    for (const auto& c : cycles)
      for (std::size_t i = 0; i < c.size(); ++i) m[c[i]] = c[(i + 1) % c.size()];
    return m;
  }

  /// Cycle notation with fixed points omitted, "()" for the identity.
  std::string str() const {
    std::ostringstream os;
    for (const auto& c : cycles) {
      if (c.size() < 2) continue;
      os << '(';
      for (std::size_t i = 0; i < c.size(); ++i) os << (i ? " " : "") << c[i];
      os << ')';
    }
    const std::string s = os.str();
    return s.empty() ? "()" : s;
  }

  friend bool operator==(const PermutationCycles&, const PermutationCycles&) = default;
  friend bool operator<(const PermutationCycles& a, const PermutationCycles& b) { return a.cycles < b.cycles; }
};

/// Walks slot -> partner -> side flip from (1, min J) until the walk comes
/// back to that index; the indices met form a cycle. Repeats on what is left.
inline PermutationCycles perm_from_pairing(const SlotPairing& pi) {
  std::set<Slot> remaining;
  std::set<int> indices;
  for (const auto& [a, b] : pi.pairs) {
    for (const Slot& s : {a, b}) {
      detail::expect(s.first == 1 || s.first == 2, "slot side must be 1 or 2");
      detail::expect(remaining.insert(s).second, "slot appears twice in the pairing");
      indices.insert(s.second);
    }
  }
  for (int j : indices)
    detail::expect(remaining.count({1, j}) && remaining.count({2, j}), "pairing must cover both copies of every index");

  PermutationCycles out;
  while (!remaining.empty()) {
    int j0 = 0;
    for (const auto& s : remaining)
      if (s.first == 1) {
        j0 = s.second;
        break;
      }
    std::vector<int> cycle{j0};
    Slot cur{1, j0};
    for (;;) {
      const Slot mate = pi.partner(cur);
      const Slot next{3 - mate.first, mate.second};
      remaining.erase(cur);
      remaining.erase(mate);
      if (next.second == j0) break;
      cycle.push_back(next.second);
      cur = next;
    }
    remaining.erase({2, j0});
    out.cycles.push_back(std::move(cycle));
  }
  return out;
}

/// 2^{sum over cycles of (length - 1)}: the number of pairings of {1,2} x J
/// that perm_from_pairing maps to sigma.
inline std::uint64_t perm_multiplicity(const PermutationCycles& sigma) {
  std::size_t e = 0;
  for (const auto& c : sigma.cycles) {
    detail::expect(!c.empty(), "empty cycle");
    e += c.size() - 1;
  }
  detail::expect(e < 64, "multiplicity exponent too large");
  return std::uint64_t{1} << e;
}

/// All pairings of {1, 2} x {1..j}.
inline std::vector<SlotPairing> enumerate_slot_pairings(int j) {
  std::vector<Slot> ground;
  for (int side = 1; side <= 2; ++side)
    for (int i = 1; i <= j; ++i) ground.emplace_back(side, i);
  return enumerate_p2(ground);
}

/// E prod_i theta(t_i)' A_i theta(t_i) for theta with covariance
/// E theta_a(t) theta_b(s) = delta_ab e^{-|t - s|} / n and symmetric A_i,
/// summed pairing by pairing through the cycles of perm_from_pairing.
inline double perm_expansion(const std::vector<Eigen::MatrixXd>& a, std::span<const double> t, double n) {
  const auto j = static_cast<int>(a.size());
  detail::require(t.size() == a.size(), "one time per matrix");
  detail::require(n > 0.0, "n must be positive");
  double total = 0.0;
  for (const auto& pi : enumerate_slot_pairings(j)) {
    const auto sigma = perm_from_pairing(pi);
    const auto next = sigma.as_map();
    double w = 1.0;
    for (int i = 1; i <= j; ++i) w *= std::exp(-std::abs(t[i - 1] - t[next.at(i) - 1])) / n;
    for (const auto& c : sigma.cycles) {
      Eigen::MatrixXd prod = a[c[0] - 1];
      for (std::size_t r = 1; r < c.size(); ++r) prod = prod * a[c[r] - 1];
      w *= prod.trace();
    }
    total += w;
  }
  return total;
}

/// Index k of an entry process observed at time t.
struct EntryAt {
  std::size_t k = 1;
  double t = 0.0;
};

namespace detail {

/// Wick sum for centred Gaussians with Cov = 2 e^{-rate(k) |t - s|} when the
/// indices agree and 0 otherwise.
template <class Rate>
double gaussian_wick(std::span<const EntryAt> xs, Rate&& rate) {
  if (xs.empty()) return 1.0;
  if (xs.size() % 2 == 1) return 0.0;
  std::vector<int> ground(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ground[i] = static_cast<int>(i);
  double total = 0.0;
  for (const auto& pi : enumerate_p2(ground)) {
    double w = 1.0;
    for (const auto& [p, q] : pi.pairs) {
      const EntryAt& x = xs[p];
      const EntryAt& y = xs[q];
      if (x.k != y.k) {
        w = 0.0;
        break;
      }
      w *= 2.0 * std::exp(-rate(x.k) * std::abs(x.t - y.t));
    }
    total += w;
  }
  return total;
}

}  // namespace detail

/// E prod A_{k_i}(t_i) prod B_{k'_i}(t'_i) for the limiting entry processes:
/// A_k has covariance 2 e^{-(2k - 1)|t - s|}, B_k has 2 e^{-2k |t - s|}, and
/// the a and b families are independent.
inline double limiting_joint_moment(std::span<const EntryAt> a, std::span<const EntryAt> b) {
  for (const auto& x : a) detail::require(x.k >= 1, "entry index must be >= 1");
  for (const auto& x : b) detail::require(x.k >= 1, "entry index must be >= 1");
  const double fa = detail::gaussian_wick(a, [](std::size_t k) { return 2.0 * static_cast<double>(k) - 1.0; });
  if (fa == 0.0) return 0.0;
  return fa * detail::gaussian_wick(b, [](std::size_t k) { return 2.0 * static_cast<double>(k); });
}

}  // namespace dbm
