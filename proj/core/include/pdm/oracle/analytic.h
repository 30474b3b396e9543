// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "pdm/dispmap.h"
#include "pdm/math.h"
#include "pdm/prism.h"

namespace pdm::oracle {

/// Closed-form displacement D(uv) in world units with its uv gradient.
struct AnalyticField {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
};

/// bias + amplitude * (1 + sin(2 pi (fu u + fv v) + phase)) / 2.
AnalyticField sinusoid(double amplitude, double bias, double fu, double fv, double phase = 0.0);
/// bias + slope * u.
AnalyticField ramp_u(double slope, double bias = 0.0);
AnalyticField constant_field(double value);

/// Writes the field sampled at texel centres; values outside the map's
/// [bias, bias + scale] range are clamped.
void rasterize(DisplacementMap& map, const AnalyticField& field);

/// Displaced-surface normal from tangents (P_x + D_x N') x (P_y + D_y N'), where x moves
/// barycentric weight from vertex 2 to 0 and y from 2 to 1 and N' is held at b. Unit.
Vec3 analytic_displaced_normal(const Prism& prism, const Bary& b, const AnalyticField& field);

/// Same with the flat term P_x x P_y replaced by |P_x x P_y| N'. Unit.
Vec3 analytic_corrected_normal(const Prism& prism, const Bary& b, const AnalyticField& field);

/// Angle between two directions in degrees.
double angle_deg(const Vec3& a, const Vec3& b);

/// Root of f on [lo, hi] with f(lo) > 0 >= f(hi), by fixed-count bisection.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, int iterations = 40);

}  // namespace pdm::oracle
