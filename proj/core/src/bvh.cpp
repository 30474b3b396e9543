// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/bvh.h"

#include <algorithm>
#include <array>
#include <numeric>

#include "pdm/error.h"

namespace pdm {
namespace {

// Beyond this depth splits fall back to the object median.
constexpr int kMedianDepth = 40;

struct Builder {
  const std::vector<Aabb>& boxes;
  std::vector<Vec3> centroids;
  std::vector<std::uint32_t>& prims;
  std::vector<BvhNode>& nodes;
  int max_depth = 0;

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, int depth) {
    max_depth = std::max(max_depth, depth);
    const std::uint32_t index = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    Aabb box, cbox;
    for (std::uint32_t i = begin; i < end; ++i) {
      box.extend(boxes[prims[i]]);
      cbox.extend(centroids[prims[i]]);
    }
    nodes[index].box = box;
    const std::uint32_t n = end - begin;
    if (n <= static_cast<std::uint32_t>(Bvh::kMaxLeaf)) {
      nodes[index].left = begin;
      nodes[index].count = static_cast<std::uint16_t>(n);
      return index;
    }

    const Vec3 ext = cbox.max - cbox.min;
    int axis = 0;
    if (ext.y() > ext[axis]) axis = 1;
    if (ext.z() > ext[axis]) axis = 2;
    std::uint32_t mid = begin + n / 2;
    bool split_done = false;

    if (depth < kMedianDepth && ext.maxCoeff() > 0.0) {
      double best_cost = std::numeric_limits<double>::infinity();
      int best_axis = -1, best_bin = -1;
      for (int a = 0; a < 3; ++a) {
        if (!(ext[a] > 0.0)) continue;
        std::array<Aabb, Bvh::kBins> bin_box;
        std::array<std::uint32_t, Bvh::kBins> bin_count{};
        const double scale = Bvh::kBins / ext[a];
        for (std::uint32_t i = begin; i < end; ++i) {
          int b = static_cast<int>((centroids[prims[i]][a] - cbox.min[a]) * scale);
          b = std::clamp(b, 0, Bvh::kBins - 1);
          bin_box[b].extend(boxes[prims[i]]);
          ++bin_count[b];
        }
        std::array<double, Bvh::kBins> right_area{};
        std::array<std::uint32_t, Bvh::kBins> right_count{};
        Aabb acc;
        std::uint32_t cnt = 0;
        for (int b = Bvh::kBins - 1; b > 0; --b) {
          acc.extend(bin_box[b]);
          cnt += bin_count[b];
          right_area[b] = acc.surface_area();
          right_count[b] = cnt;
        }
        acc = Aabb();
        cnt = 0;
        for (int b = 0; b < Bvh::kBins - 1; ++b) {
          acc.extend(bin_box[b]);
          cnt += bin_count[b];
          if (cnt == 0 || right_count[b + 1] == 0) continue;
          const double cost = acc.surface_area() * cnt + right_area[b + 1] * right_count[b + 1];
          if (cost < best_cost) {
            best_cost = cost;
            best_axis = a;
            best_bin = b;
          }
        }
      }
      if (best_axis >= 0) {
        const double scale = Bvh::kBins / ext[best_axis];
        const double lo = cbox.min[best_axis];
        auto it = std::stable_partition(
            prims.begin() + begin, prims.begin() + end, [&](std::uint32_t p) {
              int b = static_cast<int>((centroids[p][best_axis] - lo) * scale);
              return std::clamp(b, 0, Bvh::kBins - 1) <= best_bin;
            });
        mid = static_cast<std::uint32_t>(it - prims.begin());
        split_done = mid > begin && mid < end;
        axis = best_axis;
      }
    }
    if (!split_done) {
      mid = begin + n / 2;
      std::nth_element(prims.begin() + begin, prims.begin() + mid, prims.begin() + end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         if (centroids[a][axis] != centroids[b][axis])
                           return centroids[a][axis] < centroids[b][axis];
                         return a < b;
                       });
    }
    nodes[index].axis = static_cast<std::uint8_t>(axis);
    const std::uint32_t l = build(begin, mid, depth + 1);
    const std::uint32_t r = build(mid, end, depth + 1);
    nodes[index].left = l;
    nodes[index].right = r;
    return index;
  }
};

}  // namespace

Bvh Bvh::build(const std::vector<Aabb>& boxes) {
  if (boxes.empty()) throw ValidationError("bvh build needs at least one box");
  Bvh bvh;
  bvh.prims_.resize(boxes.size());
  std::iota(bvh.prims_.begin(), bvh.prims_.end(), 0u);
  // Padded copies keep box tests conservative against rounding.
  std::vector<Aabb> padded(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double pad = 1e-9 * (1.0 + boxes[i].max.cwiseAbs().cwiseMax(boxes[i].min.cwiseAbs()).maxCoeff());
    padded[i].min = boxes[i].min.array() - pad;
    padded[i].max = boxes[i].max.array() + pad;
  }
  Builder b{padded, {}, bvh.prims_, bvh.nodes_};
  b.centroids.reserve(boxes.size());
  for (const Aabb& box : padded) b.centroids.push_back(box.centroid());
  bvh.nodes_.reserve(2 * boxes.size());
  b.build(0, static_cast<std::uint32_t>(boxes.size()), 0);
  bvh.depth_ = b.max_depth;
  return bvh;
}

}  // namespace pdm
