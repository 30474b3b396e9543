// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pdm/bvh.h"
#include "pdm/dispmap.h"
#include "pdm/intersect.h"
#include "pdm/mesh.h"

namespace pdm::oracle {

/// Direction used to displace tessellated points.
enum class DisplaceAlong {
  kInterpolatedNormal,  // S = P + D N'
  kOffsetDirection,     // S = P + D O / |O|, the surface the marcher resolves
};

struct OracleHit {
  double t = 0.0;
  std::uint32_t face = 0;
  Vec3 normal = Vec3::Zero();  // micro-triangle normal, unit
};

/// Micro-triangle tessellation of a displaced base mesh, n x n per base triangle.
class Tessellation {
 public:
  static Tessellation build(const BaseMesh& mesh, const DisplacementMap& map, int n = 64,
                            DisplaceAlong along = DisplaceAlong::kInterpolatedNormal);

  std::optional<OracleHit> intersect(const Ray& ray) const;

  std::size_t triangle_count() const { return tris_.size(); }
  const std::vector<Vec3>& points() const { return points_; }

 private:
  std::vector<Vec3> points_;
  std::vector<Face> tris_;
  std::vector<std::uint32_t> owner_;
  Bvh bvh_;
};

/// Displaced point of base face f at barycentric b.
Vec3 displaced_point(const BaseMesh& mesh, std::size_t face, const Bary& b, const DisplacementMap& map,
                     DisplaceAlong along = DisplaceAlong::kInterpolatedNormal);

/// Brute-force closest hit against the undisplaced base mesh.
std::optional<OracleHit> base_mesh_hit(const BaseMesh& mesh, const Ray& ray);

}  // namespace pdm::oracle
