// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/intersect.h"

#include <cmath>

namespace pdm {

Ray make_ray(const Vec3& origin, const Vec3& dir, double t_near, double t_far) {
  Ray r;
  r.origin = origin;
  r.dir = dir.normalized();
  r.t_near = t_near;
  r.t_far = t_far;
  return r;
}

const char* boundary_name(Boundary b) {
  switch (b) {
    case Boundary::kTop: return "top";
    case Boundary::kBottom: return "bottom";
    case Boundary::kPatch0: return "patch0";
    case Boundary::kPatch1: return "patch1";
    case Boundary::kPatch2: return "patch2";
    case Boundary::kInside: return "inside";
    case Boundary::kNone: return "none";
  }
  return "none";
}

int ray_bilinear_patch(const Ray& ray, const Vec3& p00, const Vec3& p10, const Vec3& p11,
                       const Vec3& p01, std::array<PatchHit, 2>& hits) {
  const Vec3& d = ray.dir;
  const Vec3 e10 = p10 - p00;
  const Vec3 e11 = p11 - p10;
  const Vec3 e00 = p01 - p00;
  const Vec3 qn = e10.cross(p01 - p11);
  const Vec3 q00 = p00 - ray.origin;
  const Vec3 q10 = p10 - ray.origin;
  // a + b u + c u^2 = 0
  const double a = q00.cross(d).dot(e00);
  const double c = qn.dot(d);
  double b = q10.cross(d).dot(e11);
  b -= a + c;

  std::array<double, 2> roots{};
  int nroots = 0;
  if (c == 0.0) {
    if (b == 0.0) return 0;
    roots[nroots++] = -a / b;
  } else {
    double det = b * b - 4.0 * a * c;
    if (det < 0.0) return 0;
    det = std::sqrt(det);
    const double u1 = (-b - std::copysign(det, b)) / 2.0;
    if (u1 == 0.0) {
      roots[nroots++] = 0.0;
      roots[nroots++] = -b / c;
    } else {
      roots[nroots++] = u1 / c;
      roots[nroots++] = a / u1;
    }
  }

  int count = 0;
  for (int i = 0; i < nroots; ++i) {
    const double u = roots[i];
    if (!(u >= 0.0 && u <= 1.0)) continue;
    if (i == 1 && nroots == 2 && roots[0] == roots[1]) continue;
    const Vec3 pa = q00 + (q10 - q00) * u;
    const Vec3 pb = e00 + (e11 - e00) * u;
    Vec3 n = d.cross(pb);
    const double det = n.dot(n);
    if (!(det > 0.0)) continue;
    n = n.cross(pa);
    const double t1 = n.dot(pb) / det;
    const double v1 = n.dot(d) / det;
    if (!(v1 >= 0.0 && v1 <= 1.0)) continue;
    if (!(t1 >= ray.t_near && t1 <= ray.t_far)) continue;
    PatchHit h;
    h.t = t1;
    h.u = u;
    h.v = v1;
    const Vec3 du = e10 + ((p11 - p01) - e10) * v1;
    const Vec3 dv = e00 + (e11 - e00) * u;
    h.normal = du.cross(dv);
    hits[count++] = h;
  }
  if (count == 2 && hits[1].t < hits[0].t) std::swap(hits[0], hits[1]);
  return count;
}

std::optional<TriangleHit> ray_triangle(const Ray& ray, const Vec3& a, const Vec3& b, const Vec3& c) {
  constexpr double kEdgeTol = 1e-12;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = ray.dir.cross(e2);
  const double det = e1.dot(p);
  if (det == 0.0) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = s.dot(p) * inv;
  if (u < -kEdgeTol || u > 1.0 + kEdgeTol) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = ray.dir.dot(q) * inv;
  if (v < -kEdgeTol || u + v > 1.0 + kEdgeTol) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t >= ray.t_near && t <= ray.t_far)) return std::nullopt;
  return TriangleHit{t, u, v};
}

bool ray_aabb(const Ray& ray, const Vec3& inv_dir, const Aabb& box, double& t0, double& t1) {
  double lo = ray.t_near;
  double hi = ray.t_far;
  for (int a = 0; a < 3; ++a) {
    double ta = (box.min[a] - ray.origin[a]) * inv_dir[a];
    double tb = (box.max[a] - ray.origin[a]) * inv_dir[a];
    if (ta > tb) std::swap(ta, tb);
    // NaN (0 * inf) keeps the current bound.
    if (ta > lo) lo = ta;
    if (tb < hi) hi = tb;
    if (lo > hi) return false;
  }
  t0 = lo;
  t1 = hi;
  return true;
}

namespace {

BoundaryHit classify(double t, Boundary kind, const Vec3& outward, const Vec3& d) {
  BoundaryHit h;
  h.t = t;
  h.kind = kind;
  h.outward = outward;
  const double len = outward.norm();
  const double cosine = len > 0.0 ? outward.dot(d) / len : 0.0;
  h.exit = cosine >= 0.0 || std::abs(cosine) < kGrazingDot;
  return h;
}

}  // namespace

int prism_boundary_hits(const Ray& ray, const Prism& p, BoundaryHits& out) {
  int n = 0;
  const Vec3& d = ray.dir;
  if (auto h = ray_triangle(ray, p.e[0], p.e[1], p.e[2]))
    out[n++] = classify(h->t, Boundary::kTop, p.ng, d);
  if (auto h = ray_triangle(ray, p.v[0], p.v[1], p.v[2]))
    out[n++] = classify(h->t, Boundary::kBottom, -p.ng, d);
  std::array<PatchHit, 2> ph;
  for (int k = 0; k < 3; ++k) {
    const SidePatch sp = side_patch(p, k);
    const int m = ray_bilinear_patch(ray, sp.q[0], sp.q[1], sp.q[2], sp.q[3], ph);
    for (int i = 0; i < m; ++i) {
      const Vec3 outward = sp.flipped ? Vec3(-ph[i].normal) : ph[i].normal;
      out[n++] = classify(ph[i].t, static_cast<Boundary>(static_cast<int>(Boundary::kPatch0) + k),
                          outward, d);
    }
  }
  return n;
}

std::optional<IntervalHit> prism_entry_exit(const Ray& ray, const Prism& p) {
  BoundaryHits hits;
  const int n = prism_boundary_hits(ray, p, hits);
  if (n == 0) return std::nullopt;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double t_min = kInf;
  double t_max = -kInf;
  Boundary entry = Boundary::kNone;
  Boundary exit = Boundary::kNone;
  for (int i = 0; i < n; ++i) {
    const BoundaryHit& h = hits[i];
    if (h.exit) {
      if (h.t > t_max) {
        t_max = h.t;
        exit = h.kind;
      }
    } else if (h.t < t_min) {
      t_min = h.t;
      entry = h.kind;
    }
  }
  const bool has_min = t_min < kInf;
  const bool has_max = t_max > -kInf;
  IntervalHit r;
  if (has_max && !has_min) {
    if (n == 1 && t_max < ray.t_near + kTangentExitT) return std::nullopt;
    r.t_min = ray.t_near;
    r.t_max = t_max;
    r.entered_inside = true;
    r.entry_kind = Boundary::kInside;
    r.exit_kind = exit;
    return r;
  }
  if (has_min && !has_max) {
    // Exit lost numerically: fall back to the bounding box exit.
    const Aabb box = prism_aabb(p);
    double t0, t1;
    const Vec3 inv = inverse_dir(ray.dir);
    if (!ray_aabb(ray, inv, box, t0, t1)) return std::nullopt;
    t_max = std::max(t_min, t1);
    exit = Boundary::kNone;
  }
  r.t_min = t_min;
  r.t_max = t_max;
  r.entry_kind = entry;
  r.exit_kind = exit;
  int first = 0;
  for (int i = 1; i < n; ++i)
    if (hits[i].t < hits[first].t) first = i;
  if (hits[first].exit && has_max) {
    // Starts inside; may leave and re-enter before the final exit.
    r.t_min = ray.t_near;
    r.entered_inside = true;
    r.entry_kind = Boundary::kInside;
    double last = r.t_max;
    for (int i = 0; i < n; ++i) last = std::max(last, hits[i].t);
    r.t_max = last;
  }
  return r;
}

}  // namespace pdm
