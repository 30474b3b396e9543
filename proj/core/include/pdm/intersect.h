// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <limits>
#include <optional>

#include "pdm/math.h"
#include "pdm/prism.h"

namespace pdm {

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 dir = Vec3::UnitZ();  // unit length
  double t_near = 0.0;
  double t_far = std::numeric_limits<double>::infinity();

  Vec3 at(double t) const { return origin + t * dir; }
};

Ray make_ray(const Vec3& origin, const Vec3& dir, double t_near = 0.0,
             double t_far = std::numeric_limits<double>::infinity());

enum class Boundary : std::uint8_t { kTop, kBottom, kPatch0, kPatch1, kPatch2, kInside, kNone };

const char* boundary_name(Boundary b);

struct IntervalHit {
  double t_min = 0.0;
  double t_max = 0.0;
  bool entered_inside = false;
  Boundary entry_kind = Boundary::kNone;
  Boundary exit_kind = Boundary::kNone;
};

struct PatchHit {
  double t = 0.0;
  Vec3 normal = Vec3::Zero();  // dq/du x dq/dv, unnormalized
  double u = 0.0, v = 0.0;
};

/// Ray against the bilinear patch q(u,v) spanned by q00, q10, q11, q01.
/// Writes up to two hits with t in [t_near, t_far] sorted by t; returns the count.
int ray_bilinear_patch(const Ray& ray, const Vec3& q00, const Vec3& q10, const Vec3& q11,
                       const Vec3& q01, std::array<PatchHit, 2>& hits);

struct TriangleHit {
  double t = 0.0;
  double b1 = 0.0, b2 = 0.0;  // weights of the 2nd and 3rd vertex
};

/// Double-sided ray/triangle; edges inclusive.
std::optional<TriangleHit> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c);

inline Vec3 inverse_dir(const Vec3& d) { return Vec3(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z()); }

/// Ray against an AABB; returns the [t0, t1] overlap clipped to [t_near, t_far].
bool ray_aabb(const Ray& ray, const Vec3& inv_dir, const Aabb& box, double& t0, double& t1);

/// One boundary crossing with its outward normal.
struct BoundaryHit {
  double t = 0.0;
  Boundary kind = Boundary::kNone;
  Vec3 outward = Vec3::Zero();
  bool exit = false;  // n_p . r_d >= 0, or grazing
};

inline constexpr double kGrazingDot = 1e-12;
inline constexpr double kTangentExitT = 1e-9;

using BoundaryHits = std::array<BoundaryHit, 8>;

/// All boundary hits (2 triangles + 3 patches) classified as entry or exit.
/// Returns the count written to out.
int prism_boundary_hits(const Ray& ray, const Prism& prism, BoundaryHits& out);

/// Entry/exit interval. Rays starting inside get t_min = t_near.
std::optional<IntervalHit> prism_entry_exit(const Ray& ray, const Prism& prism);

}  // namespace pdm
