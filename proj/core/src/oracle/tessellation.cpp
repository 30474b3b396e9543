// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/oracle/tessellation.h"

#include "pdm/error.h"

namespace pdm::oracle {

Vec3 displaced_point(const BaseMesh& mesh, std::size_t face, const Bary& b, const DisplacementMap& map,
                     DisplaceAlong along) {
  const Face& f = mesh.faces[face];
  const Vec3 p = interpolate(b, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]);
  const Vec2 uv = interpolate(b, mesh.uvs[f[0]], mesh.uvs[f[1]], mesh.uvs[f[2]]);
  Vec3 dir;
  if (along == DisplaceAlong::kInterpolatedNormal) {
    dir = interpolate(b, mesh.normals[f[0]], mesh.normals[f[1]], mesh.normals[f[2]]).normalized();
  } else {
    const Vec3 ng = face_normal(mesh, face);
    Vec3 o = Vec3::Zero();
    for (int k = 0; k < 3; ++k) o += b[k] * mesh.normals[f[k]] / mesh.normals[f[k]].dot(ng);
    dir = o.normalized();
  }
  return p + map.sample(uv) * dir;
}

Tessellation Tessellation::build(const BaseMesh& mesh, const DisplacementMap& map, int n,
                                 DisplaceAlong along) {
  if (n < 1) throw ValidationError("tessellation rate must be >= 1");
  Tessellation t;
  const std::size_t per_face_pts = static_cast<std::size_t>(n + 1) * (n + 2) / 2;
  t.points_.reserve(per_face_pts * mesh.faces.size());
  t.tris_.reserve(static_cast<std::size_t>(n) * n * mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto base = static_cast<std::uint32_t>(t.points_.size());
    // Row i holds points with weight i/n on vertex 1, j/n on vertex 2.
    std::vector<std::uint32_t> row_start(n + 2);
    std::uint32_t idx = 0;
    for (int i = 0; i <= n; ++i) {
      row_start[i] = idx;
      for (int j = 0; j <= n - i; ++j) {
        const double b1 = static_cast<double>(i) / n;
        const double b2 = static_cast<double>(j) / n;
        t.points_.push_back(displaced_point(mesh, f, Bary(1.0 - b1 - b2, b1, b2), map, along));
        ++idx;
      }
    }
    auto id = [&](int i, int j) { return base + row_start[i] + static_cast<std::uint32_t>(j); };
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n - i; ++j) {
        t.tris_.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
        t.owner_.push_back(static_cast<std::uint32_t>(f));
        if (j + 1 <= n - i - 1) {
          t.tris_.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
          t.owner_.push_back(static_cast<std::uint32_t>(f));
        }
      }
    }
  }
  std::vector<Aabb> boxes;
  boxes.reserve(t.tris_.size());
  for (const Face& tri : t.tris_) {
    Aabb b;
    for (auto v : tri) b.extend(t.points_[v]);
    boxes.push_back(b);
  }
  t.bvh_ = Bvh::build(boxes);
  return t;
}

std::optional<OracleHit> Tessellation::intersect(const Ray& ray) const {
  const auto h = bvh_.closest_hit(ray, [&](std::uint32_t id, const Ray& r) -> std::optional<HitRecord> {
    const Face& tri = tris_[id];
    const auto th = ray_triangle(r, points_[tri[0]], points_[tri[1]], points_[tri[2]]);
    if (!th) return std::nullopt;
    HitRecord rec;
    rec.t = th->t;
    rec.prism_id = id;
    return rec;
  });
  if (!h) return std::nullopt;
  const Face& tri = tris_[h->prism_id];
  OracleHit out;
  out.t = h->t;
  out.face = owner_[h->prism_id];
  out.normal = (points_[tri[1]] - points_[tri[0]]).cross(points_[tri[2]] - points_[tri[0]]).normalized();
  return out;
}

std::optional<OracleHit> base_mesh_hit(const BaseMesh& mesh, const Ray& ray) {
  std::optional<OracleHit> best;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& tri = mesh.faces[f];
    const auto h = ray_triangle(ray, mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
    if (h && (!best || h->t < best->t)) {
      best = OracleHit{h->t, static_cast<std::uint32_t>(f), face_normal(mesh, f)};
    }
  }
  return best;
}

}  // namespace pdm::oracle
