// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Stationary Ornstein-Uhlenbeck processes (scalar, vector and GbetaE
// matrix-valued) sampled on a uniform grid with exact Gaussian transitions.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "dbm/core/dense_matrix.hpp"
#include "dbm/core/error.hpp"
#include "dbm/core/field.hpp"
#include "dbm/core/rng.hpp"

namespace dbm {

/// Uniform grid t0, t0 + dt, ..., t0 + (steps - 1) dt.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 1e-3;
  std::size_t steps = 1;

  /// Grid covering [0, t_max] with spacing dt (t_max rounded to a multiple of dt).
  static TimeGrid over(double t_max, double dt) {
    detail::require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    detail::require(t_max >= 0.0 && std::isfinite(t_max), "t_max must be non-negative");
    return {0.0, dt, static_cast<std::size_t>(std::llround(t_max / dt)) + 1};
  }

  static TimeGrid single() { return {0.0, 1.0, 1}; }

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  double span() const { return dt * static_cast<double>(steps - 1); }

  void validate() const {
    detail::require(dt > 0.0 && std::isfinite(dt), "time step must be positive");
    detail::require(std::isfinite(t0), "grid origin must be finite");
    detail::require(steps >= 1, "grid needs at least one point");
  }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Rate c of OU(c): dx = -c x dt + sqrt(2c) dW, E[x(t)x(s)] = exp(-c|t-s|).
struct OuParams {
  double rate = 1.0;

  void validate() const { detail::require(rate > 0.0 && std::isfinite(rate), "OU rate must be positive"); }
};

/// Coefficients of x(t + dt) = decay * x(t) + noise * xi.
struct OuTransition {
  double decay;
  double noise;

  static OuTransition over(double rate, double dt) {
    return {std::exp(-rate * dt), std::sqrt(-std::expm1(-2.0 * rate * dt))};
  }
};

struct OuPath {
  TimeGrid grid;
  std::vector<double> values;
};

/// dim independent OU entries; values are stored time-major.
struct OuVectorPath {
  TimeGrid grid;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t step) const { return {values.data() + step * dim, dim}; }
  double operator()(std::size_t step, std::size_t entry) const { return values[step * dim + entry]; }

  OuPath entry(std::size_t e) const {
    OuPath p{grid, std::vector<double>(grid.steps)};
    for (std::size_t s = 0; s < grid.steps; ++s) p.values[s] = (*this)(s, e);
    return p;
  }
};

inline OuPath ou_sample_path(const OuParams& params, const TimeGrid& grid, Engine& engine) {
  params.validate();
  grid.validate();
  StandardNormal normal;
  const auto tr = OuTransition::over(params.rate, grid.dt);
  OuPath path{grid, std::vector<double>(grid.steps)};
  path.values[0] = normal(engine);
  for (std::size_t s = 1; s < grid.steps; ++s) path.values[s] = tr.decay * path.values[s - 1] + tr.noise * normal(engine);
  return path;
}

inline OuPath ou_sample_path(const OuParams& params, const TimeGrid& grid, std::uint64_t seed) {
  Engine engine = SeedSplitter(seed).engine(0);
  return ou_sample_path(params, grid, engine);
}

inline OuVectorPath ou_sample_vector(std::span<const double> rates, const TimeGrid& grid, Engine& engine) {
  detail::require(!rates.empty(), "OU vector dimension must be at least 1");
  for (double r : rates) OuParams{r}.validate();
  grid.validate();

  const std::size_t dim = rates.size();
  std::vector<OuTransition> tr;
  tr.reserve(dim);
  for (double r : rates) tr.push_back(OuTransition::over(r, grid.dt));

  StandardNormal normal;
  OuVectorPath path{grid, dim, std::vector<double>(grid.steps * dim)};
  for (std::size_t d = 0; d < dim; ++d) path.values[d] = normal(engine);
  for (std::size_t s = 1; s < grid.steps; ++s) {
    const double* prev = path.values.data() + (s - 1) * dim;
    double* cur = path.values.data() + s * dim;
    for (std::size_t d = 0; d < dim; ++d) cur[d] = tr[d].decay * prev[d] + tr[d].noise * normal(engine);
  }
  return path;
}

inline OuVectorPath ou_sample_vector(const OuParams& params, std::size_t dim, const TimeGrid& grid, Engine& engine) {
  detail::require(dim >= 1, "OU vector dimension must be at least 1");
  const std::vector<double> rates(dim, params.rate);
  return ou_sample_vector(rates, grid, engine);
}

inline OuVectorPath ou_sample_vector(std::span<const double> rates, const TimeGrid& grid, std::uint64_t seed) {
  Engine engine = SeedSplitter(seed).engine(0);
  return ou_sample_vector(rates, grid, engine);
}

namespace detail {

/// Draws a stationary GbetaE entry: real N(0, 2) on the diagonal, beta
/// independent N(0, 1) components off the diagonal.
template <GbeField F>
F gbe_entry(bool diagonal, StandardNormal& normal, Engine& engine) {
  if (diagonal) return F(std::sqrt(2.0) * normal(engine));
  F v{};
  for (int c = 0; c < beta_of_v<F>; ++c) FieldTraits<F>::set_component(v, c, normal(engine));
  return v;
}

template <GbeField F>
void mirror_lower(DenseMatrix<F>& m) {
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) m(j, i) = conj_of(m(i, j));
}

}  // namespace detail

/// One stationary GbetaE matrix (GOE/GUE/GSE for F = double/complex/quaternion).
template <GbeField F>
DenseMatrix<F> gbe_sample_stationary(std::size_t n, Engine& engine) {
  detail::require(n >= 1, "matrix size must be at least 1");
  StandardNormal normal;
  DenseMatrix<F> m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) m(i, j) = detail::gbe_entry<F>(i == j, normal, engine);
  detail::mirror_lower(m);
  return m;
}

template <GbeField F>
DenseMatrix<F> gbe_sample_stationary(std::size_t n, std::uint64_t seed) {
  Engine engine = SeedSplitter(seed).engine(0);
  return gbe_sample_stationary<F>(n, engine);
}

/// Streaming GbetaE process dM = -M dt + sqrt(2) dB. Only the current frame is
/// held, so paths of large matrices can be consumed one time slice at a time.
template <GbeField F>
class GbeProcess {
 public:
  GbeProcess(std::size_t n, Engine engine) : engine_(std::move(engine)), m_(gbe_sample_stationary<F>(n, engine_)) {}

  std::size_t size() const { return m_.rows(); }
  const DenseMatrix<F>& matrix() const { return m_; }

  /// Exact transition M <- exp(-dt) M + sqrt(1 - exp(-2 dt)) G, G a fresh
  /// stationary sample.
  void advance(double dt) {
    detail::require(dt >= 0.0 && std::isfinite(dt), "time step must be non-negative");
    const auto tr = OuTransition::over(1.0, dt);
    const std::size_t n = m_.rows();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        F g = detail::gbe_entry<F>(i == j, normal_, engine_);
        m_(i, j) = tr.decay * m_(i, j) + tr.noise * g;
      }
    }
    detail::mirror_lower(m_);
  }

 private:
  Engine engine_;
  StandardNormal normal_;
  DenseMatrix<F> m_;
};

template <GbeField F>
struct GbePath {
  TimeGrid grid;
  std::size_t n = 0;
  std::vector<DenseMatrix<F>> matrices;

  static constexpr int beta = beta_of_v<F>;
};

template <GbeField F>
GbePath<F> gbe_sample_path(std::size_t n, const TimeGrid& grid, Engine engine) {
  grid.validate();
  GbeProcess<F> process(n, std::move(engine));
  GbePath<F> path{grid, n, {}};
  path.matrices.reserve(grid.steps);
  path.matrices.push_back(process.matrix());
  for (std::size_t s = 1; s < grid.steps; ++s) {
    process.advance(grid.dt);
    path.matrices.push_back(process.matrix());
  }
  return path;
}

template <GbeField F>
GbePath<F> gbe_sample_path(std::size_t n, const TimeGrid& grid, std::uint64_t seed) {
  return gbe_sample_path<F>(n, grid, SeedSplitter(seed).engine(0));
}

}  // namespace dbm
