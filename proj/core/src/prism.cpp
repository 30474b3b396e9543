// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/prism.h"

#include <cmath>

#include "pdm/dispmap.h"
#include "pdm/error.h"

namespace pdm {

double normal_factor(const Bary& b, const Prism& p) {
  return b[0] / p.n[0].dot(p.ng) + b[1] / p.n[1].dot(p.ng) + b[2] / p.n[2].dot(p.ng);
}

Prism build_prism(const BaseMesh& mesh, std::size_t face, double w_max, double w_neg,
                  double crease_eps) {
  if (face >= mesh.faces.size()) throw ValidationError("face index out of range");
  if (!(w_max > 0.0)) throw ValidationError("w_max must be positive");
  if (!(w_neg >= 0.0)) throw ValidationError("w_neg must be non-negative");
  const Face& f = mesh.faces[face];
  Prism p;
  p.face_id = static_cast<std::uint32_t>(face);
  p.ng = face_normal(mesh, face);
  double min_dot = 1.0;
  for (int k = 0; k < 3; ++k) {
    p.vid[k] = f[k];
    p.n[k] = mesh.normals[f[k]];
    p.uv[k] = mesh.uvs[f[k]];
    min_dot = std::min(min_dot, p.n[k].dot(p.ng));
  }
  if (!(min_dot > crease_eps)) throw CreaseError(face, min_dot);
  for (int k = 0; k < 3; ++k) {
    p.o[k] = p.n[k] / p.n[k].dot(p.ng);
    const Vec3& base = mesh.vertices[f[k]];
    p.v[k] = w_neg > 0.0 ? Vec3(base - w_neg * p.o[k]) : base;
  }
  p.w_neg = w_neg;
  p.w_max = w_max + w_neg;
  for (int k = 0; k < 3; ++k) p.e[k] = p.v[k] + p.w_max * p.o[k];
  return p;
}

namespace {

// Separating-axis test of a 2D triangle against an axis-aligned box.
bool tri_box_overlap_2d(const std::array<Vec2, 3>& t, const Vec2& lo, const Vec2& hi) {
  for (int axis = 0; axis < 2; ++axis) {
    const double mn = std::min({t[0][axis], t[1][axis], t[2][axis]});
    const double mx = std::max({t[0][axis], t[1][axis], t[2][axis]});
    if (mx < lo[axis] || mn > hi[axis]) return false;
  }
  const std::array<Vec2, 4> box{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = t[(k + 1) % 3] - t[k];
    const Vec2 axis(-e.y(), e.x());
    double tmn = 1e300, tmx = -1e300, bmn = 1e300, bmx = -1e300;
    for (const Vec2& q : t) {
      tmn = std::min(tmn, axis.dot(q));
      tmx = std::max(tmx, axis.dot(q));
    }
    for (const Vec2& q : box) {
      bmn = std::min(bmn, axis.dot(q));
      bmx = std::max(bmx, axis.dot(q));
    }
    if (tmx < bmn || bmx < tmn) return false;
  }
  return true;
}

}  // namespace

double per_prism_wmax(const BaseMesh& mesh, std::size_t face, const DisplacementMap& map,
                      bool* clamped) {
  const Face& f = mesh.faces[face];
  const int w = map.width();
  const int h = map.height();
  std::array<Vec2, 3> t;
  bool outside = false;
  for (int k = 0; k < 3; ++k) {
    const Vec2& uv = mesh.uvs[f[k]];
    outside |= uv.x() < 0.0 || uv.x() > 1.0 || uv.y() < 0.0 || uv.y() > 1.0;
    // Texel-centre lattice coordinates: cell (i, j) spans [i, i+1] x [j, j+1]
    // with corner texels i, i+1 and j, j+1.
    t[k] = Vec2(std::clamp(uv.x(), 0.0, 1.0) * w - 0.5, std::clamp(uv.y(), 0.0, 1.0) * h - 0.5);
  }
  if (clamped) *clamped = outside;
  const double xmn = std::min({t[0].x(), t[1].x(), t[2].x()});
  const double xmx = std::max({t[0].x(), t[1].x(), t[2].x()});
  const double ymn = std::min({t[0].y(), t[1].y(), t[2].y()});
  const double ymx = std::max({t[0].y(), t[1].y(), t[2].y()});
  const int i0 = static_cast<int>(std::floor(xmn)) - 1;
  const int i1 = static_cast<int>(std::floor(xmx)) + 1;
  const int j0 = static_cast<int>(std::floor(ymn)) - 1;
  const int j1 = static_cast<int>(std::floor(ymx)) + 1;
  std::uint16_t m = 0;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      if (!tri_box_overlap_2d(t, Vec2(i, j), Vec2(i + 1, j + 1))) continue;
      m = std::max({m, map.texel(i, j), map.texel(i + 1, j), map.texel(i, j + 1),
                    map.texel(i + 1, j + 1)});
    }
  }
  const double d_max = map.world_bias() + map.world_scale() * (m / 65535.0);
  return std::max(d_max * (1.0 + kWmaxPad), 1e-9);
}

Aabb prism_aabb(const Prism& p) {
  Aabb b;
  for (int k = 0; k < 3; ++k) {
    b.extend(p.v[k]);
    b.extend(p.e[k]);
  }
  return b;
}

double bounding_radius(const BaseMesh& mesh) {
  Aabb b;
  for (const Vec3& v : mesh.vertices) b.extend(v);
  const Vec3 c = b.centroid();
  double r = 0.0;
  for (const Vec3& v : mesh.vertices) r = std::max(r, (v - c).norm());
  return r;
}

double default_global_wmax(const BaseMesh& mesh) { return 0.05 * bounding_radius(mesh); }

Vec3 base_point(const Prism& p, const Bary& b) { return interpolate(b, p.v[0], p.v[1], p.v[2]); }

Vec3 interpolated_normal(const Prism& p, const Bary& b) {
  return normalized_or(interpolate(b, p.n[0], p.n[1], p.n[2]), p.ng);
}

Vec3 offset_vector(const Prism& p, const Bary& b) { return interpolate(b, p.o[0], p.o[1], p.o[2]); }

Vec3 parallel_offset_point(const Prism& p, const Bary& b, double w) {
  return base_point(p, b) + w * normal_factor(b, p) * interpolated_normal(p, b);
}

Vec3 shell_point(const Prism& p, const Bary& b, double w) {
  return base_point(p, b) + w * offset_vector(p, b);
}

Vec3 standard_prism_point(const Prism& p, const Bary& b, double w) {
  return base_point(p, b) + w * interpolate(b, p.n[0], p.n[1], p.n[2]);
}

namespace {

bool lex_less(const Vec3& a, std::uint32_t ia, const Vec3& b, std::uint32_t ib) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  if (a.z() != b.z()) return a.z() < b.z();
  return ia < ib;
}

}  // namespace

SidePatch side_patch(const Prism& p, int k) {
  const int k1 = (k + 1) % 3;
  SidePatch s;
  if (lex_less(p.v[k], p.vid[k], p.v[k1], p.vid[k1])) {
    s.q = {p.v[k], p.v[k1], p.e[k1], p.e[k]};
    s.flipped = false;
  } else {
    s.q = {p.v[k1], p.v[k], p.e[k], p.e[k1]};
    s.flipped = true;
  }
  return s;
}

std::vector<Prism> build_prisms(const BaseMesh& mesh, const std::vector<double>& w_max,
                                double w_neg, double crease_eps) {
  if (w_max.size() != mesh.faces.size()) throw ValidationError("w_max list must match face count");
  std::vector<Prism> out;
  out.reserve(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    out.push_back(build_prism(mesh, f, w_max[f], w_neg, crease_eps));
  return out;
}

}  // namespace pdm
