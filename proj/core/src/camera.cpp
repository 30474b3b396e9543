// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/camera.h"

#include <cmath>

#include "pdm/error.h"

namespace pdm {
namespace {

struct Basis {
  Vec3 forward, right, up;
  double half_h, half_w;
};

Basis basis(const Camera& c) {
  Basis b;
  b.forward = (c.look_at - c.position).normalized();
  b.right = b.forward.cross(c.up).normalized();
  b.up = b.right.cross(b.forward);
  b.half_h = std::tan(deg_to_rad(c.fov_deg) * 0.5);
  b.half_w = b.half_h * static_cast<double>(c.width) / c.height;
  return b;
}

}  // namespace

void Camera::validate() const {
  if (!(fov_deg > 0.0 && fov_deg < 180.0)) throw ValidationError("camera fov must be in (0, 180)");
  if (width < 1 || height < 1) throw ValidationError("camera dimensions must be >= 1");
  const Vec3 f = look_at - position;
  if (!(f.norm() > 0.0)) throw ValidationError("camera position equals look_at");
  if (!(f.normalized().cross(up).norm() > 1e-9)) throw ValidationError("camera up is parallel to view");
}

Ray Camera::generate_ray(int px, int py, double sx, double sy) const {
  const Basis b = basis(*this);
  const double x = (2.0 * (px + sx) / width - 1.0) * b.half_w;
  const double y = (1.0 - 2.0 * (py + sy) / height) * b.half_h;
  return make_ray(position, b.forward + x * b.right + y * b.up);
}

std::optional<Vec2> Camera::project(const Vec3& p) const {
  const Basis b = basis(*this);
  const Vec3 d = p - position;
  const double z = d.dot(b.forward);
  if (!(z > 1e-12)) return std::nullopt;
  const double x = d.dot(b.right) / (z * b.half_w);
  const double y = d.dot(b.up) / (z * b.half_h);
  return Vec2((x + 1.0) * 0.5 * width, (1.0 - y) * 0.5 * height);
}

}  // namespace pdm
