// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <complex>
#include <ostream>

namespace dbm {

/// Real quaternion w + x i + y j + z k. Multiplication is the Hamilton
/// product and does not commute.
struct Quaternion {
  double w = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quaternion() = default;
  constexpr Quaternion(double real) : w(real) {}  // NOLINT(google-explicit-constructor)
  constexpr Quaternion(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  constexpr Quaternion& operator+=(const Quaternion& o) {
    w += o.w; x += o.x; y += o.y; z += o.z;
    return *this;
  }
  constexpr Quaternion& operator-=(const Quaternion& o) {
    w -= o.w; x -= o.x; y -= o.y; z -= o.z;
    return *this;
  }
  constexpr Quaternion& operator*=(double s) {
    w *= s; x *= s; y *= s; z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Quaternion&, const Quaternion&) = default;
};

constexpr Quaternion operator+(Quaternion a, const Quaternion& b) { return a += b; }
constexpr Quaternion operator-(Quaternion a, const Quaternion& b) { return a -= b; }
constexpr Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
constexpr Quaternion operator*(Quaternion a, double s) { return a *= s; }
constexpr Quaternion operator*(double s, Quaternion a) { return a *= s; }
constexpr Quaternion operator/(Quaternion a, double s) { return a *= (1.0 / s); }

constexpr Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

constexpr Quaternion conj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }
constexpr double norm(const Quaternion& q) { return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z; }
inline double abs(const Quaternion& q) { return std::sqrt(norm(q)); }
constexpr double real(const Quaternion& q) { return q.w; }

/// Complex 2x2 image of q = z1 + z2 j as [[z1, z2], [-conj(z2), conj(z1)]].
/// The map is an injective ring homomorphism taking conj to the adjoint.
struct QuaternionBlock {
  std::complex<double> a, b, c, d;  // row-major 2x2
};

inline QuaternionBlock to_complex_block(const Quaternion& q) {
  const std::complex<double> z1(q.w, q.x);
  const std::complex<double> z2(q.y, q.z);
  return {z1, z2, -std::conj(z2), std::conj(z1)};
}

inline std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << '(' << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ')';
}

}  // namespace dbm
