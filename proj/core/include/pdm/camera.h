// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "pdm/intersect.h"
#include "pdm/math.h"

namespace pdm {

/// Pinhole camera. Pixel (0, 0) is the top-left corner of the image.
struct Camera {
  Vec3 position = Vec3(0.0, 0.0, 3.0);
  Vec3 look_at = Vec3::Zero();
  Vec3 up = Vec3::UnitY();
  double fov_deg = 40.0;  // vertical
  int width = 256;
  int height = 256;

  /// Throws ValidationError on a bad fov, size or degenerate basis.
  void validate() const;

  /// Ray through image position (px + sx, py + sy), sx, sy in [0, 1).
  Ray generate_ray(int px, int py, double sx = 0.5, double sy = 0.5) const;

  /// Continuous pixel coordinates of a world point; nullopt when behind the camera.
  std::optional<Vec2> project(const Vec3& p) const;

  bool operator==(const Camera&) const = default;
};

}  // namespace pdm
