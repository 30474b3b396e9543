// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "pdm/math.h"
#include "pdm/mesh.h"

namespace pdm {

class DisplacementMap;

struct Aabb {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  bool empty() const { return (min.array() > max.array()).any(); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb& b) {
    min = min.cwiseMin(b.min);
    max = max.cwiseMax(b.max);
  }
  bool contains(const Vec3& p, double tol = 0.0) const {
    return (p.array() >= min.array() - tol).all() && (p.array() <= max.array() + tol).all();
  }
  bool contains(const Aabb& b) const { return contains(b.min) && contains(b.max); }
  Vec3 centroid() const { return 0.5 * (min + max); }
  double surface_area() const {
    if (empty()) return 0.0;
    const Vec3 d = max - min;
    return 2.0 * (d.x() * d.y() + d.y() * d.z() + d.z() * d.x());
  }
};

/// Parallel offset prism over one base triangle.
struct Prism {
  std::array<Vec3, 3> v;   // bottom face (shifted down by w_neg when w_neg > 0)
  std::array<Vec3, 3> e;   // top face, e_i = v_i + w_max o_i
  std::array<Vec3, 3> o;   // N_i / (N_i . N_g)
  std::array<Vec3, 3> n;   // unit vertex normals
  Vec3 ng;
  std::array<Vec2, 3> uv;
  std::array<std::uint32_t, 3> vid{};  // mesh vertex ids, for shared-patch ordering
  double w_max = 0.0;                  // total shell height (includes w_neg)
  double w_neg = 0.0;
  std::uint32_t face_id = 0;
};

inline constexpr double kCreaseEpsilon = 0.08715574274765817;  // sin(5 deg)
inline constexpr double kWmaxPad = 1e-3;

/// Normal factor n_f for barycentric b (weights of vertices 0, 1, 2).
double normal_factor(const Bary& b, const Prism& prism);

/// Throws CreaseError when any N_i . N_g <= crease_eps.
Prism build_prism(const BaseMesh& mesh, std::size_t face, double w_max, double w_neg = 0.0,
                  double crease_eps = kCreaseEpsilon);

/// Conservative bound on D over the face's uv triangle, padded by kWmaxPad.
/// clamped is set when the uv triangle leaves [0,1]^2.
double per_prism_wmax(const BaseMesh& mesh, std::size_t face, const DisplacementMap& map,
                      bool* clamped = nullptr);

Aabb prism_aabb(const Prism& prism);

/// Default global w_max: 0.05 of the bounding-sphere radius.
double default_global_wmax(const BaseMesh& mesh);
double bounding_radius(const BaseMesh& mesh);

// Base point P(b), interpolated unit normal N'(b), offset O(b) = sum b_i o_i.
Vec3 base_point(const Prism& prism, const Bary& b);
Vec3 interpolated_normal(const Prism& prism, const Bary& b);
Vec3 offset_vector(const Prism& prism, const Bary& b);

/// R_pop(b, w) = P + w n_f N', N' normalized.
Vec3 parallel_offset_point(const Prism& prism, const Bary& b, double w);
/// Point of the linear shell: sum b_i (v_i + w o_i). Height above the base plane is w.
Vec3 shell_point(const Prism& prism, const Bary& b, double w);
/// Standard prism point P + w N' with un-normalized N'; baseline only.
Vec3 standard_prism_point(const Prism& prism, const Bary& b, double w);

/// Side patch k spans base edge (v_k, v_k+1) and top edge (e_k, e_k+1).
/// Corners are ordered q00, q10, q11, q01 with q00 on the base edge vertex that has
/// the smaller mesh id; flipped reports whether that reverses the outward normal.
struct SidePatch {
  std::array<Vec3, 4> q;
  bool flipped = false;
};
SidePatch side_patch(const Prism& prism, int k);

std::vector<Prism> build_prisms(const BaseMesh& mesh, const std::vector<double>& w_max,
                                double w_neg = 0.0, double crease_eps = kCreaseEpsilon);

}  // namespace pdm
