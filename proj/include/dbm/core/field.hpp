// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <type_traits>

#include "dbm/core/error.hpp"
#include "dbm/core/quaternion.hpp"

namespace dbm {

/// Scalar field of the Gaussian beta-ensemble: R, C or H for beta = 1, 2, 4.
template <class F>
struct FieldTraits;

template <>
struct FieldTraits<double> {
  static constexpr int beta = 1;
  static double conj(double v) { return v; }
  static double norm(double v) { return v * v; }
  static double real(double v) { return v; }
  static double component(double v, int) { return v; }
  static void set_component(double& v, int, double c) { v = c; }
};

template <>
struct FieldTraits<std::complex<double>> {
  static constexpr int beta = 2;
  static std::complex<double> conj(const std::complex<double>& v) { return std::conj(v); }
  static double norm(const std::complex<double>& v) { return v.real() * v.real() + v.imag() * v.imag(); }
  static double real(const std::complex<double>& v) { return v.real(); }
  static double component(const std::complex<double>& v, int i) { return i == 0 ? v.real() : v.imag(); }
  static void set_component(std::complex<double>& v, int i, double c) {
    if (i == 0) v.real(c); else v.imag(c);
  }
};

template <>
struct FieldTraits<Quaternion> {
  static constexpr int beta = 4;
  static Quaternion conj(const Quaternion& v) { return dbm::conj(v); }
  static double norm(const Quaternion& v) { return dbm::norm(v); }
  static double real(const Quaternion& v) { return v.w; }
  static double component(const Quaternion& v, int i) {
    switch (i) {
      case 0: return v.w;
      case 1: return v.x;
      case 2: return v.y;
      default: return v.z;
    }
  }
  static void set_component(Quaternion& v, int i, double c) {
    switch (i) {
      case 0: v.w = c; break;
      case 1: v.x = c; break;
      case 2: v.y = c; break;
      default: v.z = c; break;
    }
  }
};

template <class F>
concept GbeField = requires { FieldTraits<F>::beta; };

template <GbeField F>
inline constexpr int beta_of_v = FieldTraits<F>::beta;

template <GbeField F>
inline constexpr bool is_real_field_v = std::is_same_v<F, double>;

template <int Beta>
struct ScalarForBeta;
template <>
struct ScalarForBeta<1> { using type = double; };
template <>
struct ScalarForBeta<2> { using type = std::complex<double>; };
template <>
struct ScalarForBeta<4> { using type = Quaternion; };

template <int Beta>
using gbe_scalar_t = typename ScalarForBeta<Beta>::type;

inline void validate_beta(int beta) {
  detail::require(beta == 1 || beta == 2 || beta == 4, "beta must be one of 1, 2, 4 (got " + std::to_string(beta) + ")");
}

/// Runs fn.template operator()<F>() with the scalar type matching a runtime beta.
template <class Fn>
decltype(auto) dispatch_beta(int beta, Fn&& fn) {
  validate_beta(beta);
  switch (beta) {
    case 1: return fn.template operator()<double>();
    case 2: return fn.template operator()<std::complex<double>>();
    default: return fn.template operator()<Quaternion>();
  }
}

template <GbeField F>
F conj_of(const F& v) { return FieldTraits<F>::conj(v); }
template <GbeField F>
double norm_of(const F& v) { return FieldTraits<F>::norm(v); }
template <GbeField F>
double abs_of(const F& v) { return std::sqrt(FieldTraits<F>::norm(v)); }
template <GbeField F>
double real_of(const F& v) { return FieldTraits<F>::real(v); }

}  // namespace dbm
