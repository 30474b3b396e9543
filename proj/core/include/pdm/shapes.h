// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "pdm/dispmap.h"
#include "pdm/mesh.h"

namespace pdm {

/// Latitude/longitude sphere with radial normals. segments >= 3, rings >= 2.
/// Faces: 2 * segments * (rings - 1). u runs with longitude, v from the +y pole.
BaseMesh make_uv_sphere(int segments, int rings, double radius = 1.0, const Vec3& center = Vec3::Zero());

/// Flat n x n grid of quads over [-half, half]^2 in the xy plane, normal +z, uv over [0,1]^2.
BaseMesh make_grid(int n, double half = 1.0);

/// Smooth random height field for make_uv_sphere(segments, rings): columns 0 and
/// W-1 match across the u seam and the pole bands vary only in v, so the
/// displaced sphere stays closed.
DisplacementMap make_sphere_noise_map(int width, int height, int rings, std::uint64_t seed,
                                      double world_scale, double world_bias, int octaves = 4);

}  // namespace pdm
