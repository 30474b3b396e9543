// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

namespace pdm {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
// Barycentric weights (b0, b1, b2) paired with triangle vertices 0, 1, 2.
using Bary = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

/// Angle in radians between two non-zero vectors (atan2 form, stable near 0 and pi).
inline double angle_between(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline Vec3 normalized_or(const Vec3& v, const Vec3& fallback) {
  const double n = v.norm();
  return n > 0.0 && std::isfinite(n) ? Vec3(v / n) : fallback;
}

inline Vec3 interpolate(const Bary& b, const Vec3& a0, const Vec3& a1, const Vec3& a2) {
  return b[0] * a0 + b[1] * a1 + b[2] * a2;
}

inline Vec2 interpolate(const Bary& b, const Vec2& a0, const Vec2& a1, const Vec2& a2) {
  return b[0] * a0 + b[1] * a1 + b[2] * a2;
}

inline double smoothstep01(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace pdm
