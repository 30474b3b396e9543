// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pdm/intersect.h"
#include "pdm/march.h"
#include "pdm/prism.h"

namespace pdm {

struct BvhNode {
  Aabb box;
  std::uint32_t left = 0;   // interior: left child; leaf: first index into prims
  std::uint32_t right = 0;  // interior: right child
  std::uint16_t count = 0;  // > 0 for leaves
  std::uint8_t axis = 0;
  bool leaf() const { return count > 0; }
};

/// Binned-SAH bounding volume hierarchy over boxes.
class Bvh {
 public:
  static constexpr int kBins = 16;
  static constexpr int kMaxLeaf = 2;
  static constexpr int kMaxDepth = 64;

  Bvh() = default;
  /// Throws ValidationError on empty input. Deterministic for a fixed input order.
  static Bvh build(const std::vector<Aabb>& boxes);

  const std::vector<BvhNode>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& prims() const { return prims_; }
  int depth() const { return depth_; }
  bool empty() const { return nodes_.empty(); }

  /// Closest accepted hit. isect(prim, ray) returns std::optional<HitRecord>.
  /// Ties on t go to the lower prim id, so the result matches a linear scan.
  template <typename Isect>
  std::optional<HitRecord> closest_hit(const Ray& ray, Isect&& isect) const;

  /// True when any prim reports a hit.
  template <typename Isect>
  bool any_hit(const Ray& ray, Isect&& isect) const;

 private:
  std::vector<BvhNode> nodes_;
  std::vector<std::uint32_t> prims_;
  int depth_ = 0;
};

inline bool better_hit(const HitRecord& a, std::uint32_t a_id, const std::optional<HitRecord>& best,
                       std::uint32_t best_id) {
  if (!best) return true;
  if (a.t != best->t) return a.t < best->t;
  return a_id < best_id;
}

template <typename Isect>
std::optional<HitRecord> Bvh::closest_hit(const Ray& ray, Isect&& isect) const {
  std::optional<HitRecord> best;
  std::uint32_t best_id = 0;
  if (nodes_.empty()) return best;
  const Vec3 inv = inverse_dir(ray.dir);
  std::uint32_t stack[kMaxDepth * 2 + 2];
  int sp = 0;
  double t0, t1;
  if (!ray_aabb(ray, inv, nodes_[0].box, t0, t1)) return best;
  stack[sp++] = 0;
  while (sp > 0) {
    const BvhNode& node = nodes_[stack[--sp]];
    if (!ray_aabb(ray, inv, node.box, t0, t1)) continue;
    if (best && t0 > best->t) continue;
    if (node.leaf()) {
      for (std::uint32_t i = 0; i < node.count; ++i) {
        const std::uint32_t id = prims_[node.left + i];
        auto h = isect(id, ray);
        if (h && better_hit(*h, id, best, best_id)) {
          best = h;
          best_id = id;
        }
      }
      continue;
    }
    double la0, la1, ra0, ra1;
    const bool hl = ray_aabb(ray, inv, nodes_[node.left].box, la0, la1);
    const bool hr = ray_aabb(ray, inv, nodes_[node.right].box, ra0, ra1);
    if (hl && hr) {
      // Push the far child first.
      if (la0 <= ra0) {
        stack[sp++] = node.right;
        stack[sp++] = node.left;
      } else {
        stack[sp++] = node.left;
        stack[sp++] = node.right;
      }
    } else if (hl) {
      stack[sp++] = node.left;
    } else if (hr) {
      stack[sp++] = node.right;
    }
  }
  return best;
}

template <typename Isect>
bool Bvh::any_hit(const Ray& ray, Isect&& isect) const {
  if (nodes_.empty()) return false;
  const Vec3 inv = inverse_dir(ray.dir);
  std::uint32_t stack[kMaxDepth * 2 + 2];
  int sp = 0;
  stack[sp++] = 0;
  double t0, t1;
  while (sp > 0) {
    const BvhNode& node = nodes_[stack[--sp]];
    if (!ray_aabb(ray, inv, node.box, t0, t1)) continue;
    if (node.leaf()) {
      for (std::uint32_t i = 0; i < node.count; ++i)
        if (isect(prims_[node.left + i], ray)) return true;
      continue;
    }
    stack[sp++] = node.right;
    stack[sp++] = node.left;
  }
  return false;
}

/// Reference: invokes isect on every prim and keeps the closest (ties to lower id).
template <typename Isect>
std::optional<HitRecord> linear_scan(const Ray& ray, std::size_t prim_count, Isect&& isect) {
  std::optional<HitRecord> best;
  std::uint32_t best_id = 0;
  for (std::uint32_t id = 0; id < prim_count; ++id) {
    auto h = isect(id, ray);
    if (h && better_hit(*h, id, best, best_id)) {
      best = h;
      best_id = id;
    }
  }
  return best;
}

}  // namespace pdm
