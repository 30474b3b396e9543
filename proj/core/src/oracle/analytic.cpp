// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/oracle/analytic.h"

#include <cmath>

#include "pdm/error.h"

namespace pdm::oracle {

AnalyticField sinusoid(double amplitude, double bias, double fu, double fv, double phase) {
  AnalyticField f;
  f.value = [=](const Vec2& uv) {
    return bias + amplitude * 0.5 * (1.0 + std::sin(2.0 * kPi * (fu * uv.x() + fv * uv.y()) + phase));
  };
  f.gradient = [=](const Vec2& uv) {
    const double c = amplitude * kPi * std::cos(2.0 * kPi * (fu * uv.x() + fv * uv.y()) + phase);
    return Vec2(c * fu, c * fv);
  };
  return f;
}

AnalyticField ramp_u(double slope, double bias) {
  AnalyticField f;
  f.value = [=](const Vec2& uv) { return bias + slope * uv.x(); };
  f.gradient = [=](const Vec2&) { return Vec2(slope, 0.0); };
  return f;
}

AnalyticField constant_field(double value) {
  AnalyticField f;
  f.value = [=](const Vec2&) { return value; };
  f.gradient = [](const Vec2&) { return Vec2(0.0, 0.0); };
  return f;
}

void rasterize(DisplacementMap& map, const AnalyticField& field) {
  if (!(map.world_scale() > 0.0)) throw ValidationError("rasterize needs a positive world_scale");
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      const Vec2 uv((x + 0.5) / map.width(), (y + 0.5) / map.height());
      const double n = (field.value(uv) - map.world_bias()) / map.world_scale();
      map.set_texel(x, y, static_cast<std::uint16_t>(std::lround(std::clamp(n, 0.0, 1.0) * 65535.0)));
    }
}

namespace {

struct Tangents {
  Vec3 px, py, n;
  double dx, dy;
};

Tangents tangents(const Prism& p, const Bary& b, const AnalyticField& field) {
  Tangents t;
  t.px = p.v[0] - p.v[2];
  t.py = p.v[1] - p.v[2];
  t.n = interpolated_normal(p, b);
  const Vec2 uv = interpolate(b, p.uv[0], p.uv[1], p.uv[2]);
  const Vec2 g = field.gradient(uv);
  t.dx = g.dot(p.uv[0] - p.uv[2]);
  t.dy = g.dot(p.uv[1] - p.uv[2]);
  return t;
}

}  // namespace

Vec3 analytic_displaced_normal(const Prism& p, const Bary& b, const AnalyticField& field) {
  const Tangents t = tangents(p, b, field);
  const Vec3 ns = t.px.cross(t.py) + t.dy * t.px.cross(t.n) + t.dx * t.n.cross(t.py);
  return ns.normalized();
}

Vec3 analytic_corrected_normal(const Prism& p, const Bary& b, const AnalyticField& field) {
  const Tangents t = tangents(p, b, field);
  const Vec3 ns = t.px.cross(t.py).norm() * t.n + t.dy * t.px.cross(t.n) + t.dx * t.n.cross(t.py);
  return ns.normalized();
}

double angle_deg(const Vec3& a, const Vec3& b) { return rad_to_deg(angle_between(a, b)); }

double bisect_root(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace pdm::oracle
