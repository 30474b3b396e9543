// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/dispmap.h"

#include <cmath>
#include <string>

#include "pdm/error.h"

namespace pdm {
namespace {

struct BilinearTap {
  int x0, x1, y0, y1;
  double fx, fy;
};

BilinearTap bilinear_tap(const Vec2& uv, int w, int h) {
  const double x = std::clamp(uv.x(), 0.0, 1.0) * w - 0.5;
  const double y = std::clamp(uv.y(), 0.0, 1.0) * h - 0.5;
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  BilinearTap t;
  t.fx = x - fx0;
  t.fy = y - fy0;
  const int ix = static_cast<int>(fx0);
  const int iy = static_cast<int>(fy0);
  t.x0 = std::clamp(ix, 0, w - 1);
  t.x1 = std::clamp(ix + 1, 0, w - 1);
  t.y0 = std::clamp(iy, 0, h - 1);
  t.y1 = std::clamp(iy + 1, 0, h - 1);
  return t;
}

// Texel-centre footprint of a brush of radius r (texels) at uv.
struct Footprint {
  double cx, cy;
  DirtyRect rect;
};

Footprint footprint(const Vec2& uv, double radius, int w, int h) {
  Footprint f;
  f.cx = uv.x() * w - 0.5;
  f.cy = uv.y() * h - 0.5;
  const double eps = 1e-9;
  f.rect.x0 = static_cast<int>(std::ceil(f.cx - radius - eps));
  f.rect.x1 = static_cast<int>(std::floor(f.cx + radius + eps)) + 1;
  f.rect.y0 = static_cast<int>(std::ceil(f.cy - radius - eps));
  f.rect.y1 = static_cast<int>(std::floor(f.cy + radius + eps)) + 1;
  f.rect = f.rect.intersect({0, 0, w, h});
  return f;
}

std::uint16_t to_u16(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 65535.0)));
}

}  // namespace

DisplacementMap::DisplacementMap(int width, int height, double world_scale, double world_bias,
                                 std::uint16_t fill)
    : texels_(width, height, fill), world_scale_(world_scale), world_bias_(world_bias) {
  if (width < 1 || height < 1) throw ValidationError("displacement map must be at least 1x1");
}

double DisplacementMap::sample_normalized(const Vec2& uv) const {
  const BilinearTap t = bilinear_tap(uv, width(), height());
  const double a = texels_.at(t.x0, t.y0);
  const double b = texels_.at(t.x1, t.y0);
  const double c = texels_.at(t.x0, t.y1);
  const double d = texels_.at(t.x1, t.y1);
  const double top = a + (b - a) * t.fx;
  const double bot = c + (d - c) * t.fx;
  return (top + (bot - top) * t.fy) * (1.0 / 65535.0);
}

Eigen::Vector4d ColorMap::sample(const Vec2& uv) const {
  const BilinearTap t = bilinear_tap(uv, width(), height());
  auto get = [&](int x, int y) {
    const Rgba8& p = texels_.at(x, y);
    return Eigen::Vector4d(p[0], p[1], p[2], p[3]);
  };
  const Eigen::Vector4d top = get(t.x0, t.y0) + (get(t.x1, t.y0) - get(t.x0, t.y0)) * t.fx;
  const Eigen::Vector4d bot = get(t.x0, t.y1) + (get(t.x1, t.y1) - get(t.x0, t.y1)) * t.fx;
  return (top + (bot - top) * t.fy) / 255.0;
}

double sample_bilinear(const DisplacementMap& map, const Vec2& uv) { return map.sample(uv); }

void validate_brush(const Brush& brush) {
  if (!(brush.radius >= 1.0) || !std::isfinite(brush.radius))
    throw ValidationError("brush radius must be >= 1 texel");
  if (!std::isfinite(brush.strength) || brush.strength < -1.0 || brush.strength > 1.0)
    throw ValidationError("brush strength must be in [-1, 1]");
}

double brush_weight(const Brush& brush, double r) {
  if (r > brush.radius) return 0.0;
  const double x = 1.0 - r / brush.radius;
  switch (brush.falloff) {
    case Falloff::kHard:
      return 1.0;
    case Falloff::kLinear:
      return x;
    case Falloff::kSmoothstep:
      return smoothstep01(x);
  }
  return 0.0;
}

DirtyRect apply_brush(DisplacementMap& map, const Vec2& center_uv, const Brush& brush) {
  validate_brush(brush);
  const Footprint fp = footprint(center_uv, brush.radius, map.width(), map.height());
  if (fp.rect.empty()) return fp.rect;
  const DisplacementMap before = map;
  for (int y = fp.rect.y0; y < fp.rect.y1; ++y) {
    for (int x = fp.rect.x0; x < fp.rect.x1; ++x) {
      const double r = std::hypot(x - fp.cx, y - fp.cy);
      const double f = brush_weight(brush, r);
      if (f <= 0.0) continue;
      const double old = before.texel(x, y);
      double next = old;
      switch (brush.mode) {
        case BlendMode::kAdd:
          next = old + brush.strength * f * 65535.0;
          break;
        case BlendMode::kMax:
          next = std::max(old, brush.strength * f * 65535.0);
          break;
        case BlendMode::kSmooth: {
          double sum = 0.0;
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) sum += before.texel(x + dx, y + dy);
          const double k = std::abs(brush.strength) * f;
          next = old + (sum / 9.0 - old) * k;
          break;
        }
      }
      const std::uint16_t v = to_u16(next);
      if (v != before.texel(x, y)) map.set_texel(x, y, v);
    }
  }
  return fp.rect;
}

DirtyRect apply_color_brush(ColorMap& map, const Vec2& center_uv, const Brush& brush,
                            double radius_scale) {
  if (!brush.color || !map.valid()) return {};
  Brush scaled = brush;
  scaled.radius = std::max(1.0, brush.radius * radius_scale);
  validate_brush(scaled);
  const Footprint fp = footprint(center_uv, scaled.radius, map.width(), map.height());
  const Rgba8 c = *brush.color;
  for (int y = fp.rect.y0; y < fp.rect.y1; ++y) {
    for (int x = fp.rect.x0; x < fp.rect.x1; ++x) {
      const double f = brush_weight(scaled, std::hypot(x - fp.cx, y - fp.cy));
      if (f <= 0.0) continue;
      const double k = f * std::abs(brush.strength) * (c[3] / 255.0);
      Rgba8 p = map.texel(x, y);
      for (int ch = 0; ch < 3; ++ch)
        p[ch] = static_cast<std::uint8_t>(std::lround(p[ch] + (c[ch] - p[ch]) * k));
      map.set_texel(x, y, p);
    }
  }
  return fp.rect;
}

double region_max(const DisplacementMap& map, const DirtyRect& rect) {
  const DirtyRect r = rect.intersect({0, 0, map.width(), map.height()});
  std::uint16_t m = 0;
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) m = std::max(m, map.texels().at(x, y));
  return m / 65535.0;
}

bool exceeds_bound(const DisplacementMap& map, const DirtyRect& rect, double bound) {
  return region_max(map, rect) * map.world_scale() + map.world_bias() > bound;
}

}  // namespace pdm
