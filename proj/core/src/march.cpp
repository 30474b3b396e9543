// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/march.h"

#include <cmath>

#include "pdm/error.h"

namespace pdm {

Bary triangle_barycentric(const Vec3& s, const Vec3& c0, const Vec3& c1, const Vec3& c2) {
  const Vec3 x0 = c1 - c0;
  const Vec3 x1 = c2 - c0;
  const Vec3 x2 = s - c0;
  const double d00 = x0.dot(x0);
  const double d01 = x0.dot(x1);
  const double d11 = x1.dot(x1);
  const double d20 = x2.dot(x0);
  const double d21 = x2.dot(x1);
  const double denom = d00 * d11 - d01 * d01;
  if (!(denom >= 1e-18)) throw ContractError("triangle_barycentric: degenerate triangle");
  const double inv = 1.0 / denom;
  Bary b;
  b.y() = (d11 * d20 - d01 * d21) * inv;
  b.z() = (d00 * d21 - d01 * d20) * inv;
  b.x() = 1.0 - b.y() - b.z();
  return b;
}

MarchState init_march_state(const Prism& p, const Vec3& s, double t, double dt) {
  MarchState st;
  st.t = t;
  st.s = s;
  st.dt = dt;
  const double lambda = p.ng.dot(s - p.v[0]);
  for (int k = 0; k < 3; ++k) st.c[k] = p.v[k] + lambda * p.o[k];
  return st;
}

void advance_scanning_triangle(MarchState& st, const Prism& p) {
  const double dh = p.ng.dot(st.c[0] - st.s);
  for (int k = 0; k < 3; ++k) st.c[k] -= p.o[k] * dh;
}

double interpolate_crossing(double t_prev, double dt, double f_prev, double f_curr) {
  if (!(f_prev > 0.0 && f_curr <= 0.0))
    throw ContractError("interpolate_crossing: sign change not bracketed");
  return t_prev + dt * (f_prev / (f_prev - f_curr));
}

int march_sample_count(double t_min, double t_max, double dt) {
  const double span = std::max(0.0, t_max - t_min);
  return 1 + std::max(1, static_cast<int>(std::ceil(span / dt)));
}

double default_delta_b(const Prism& p, const DisplacementMap& map) {
  const Vec2 a = p.uv[1] - p.uv[0];
  const Vec2 b = p.uv[2] - p.uv[0];
  const double uv_area = 0.5 * std::abs(a.x() * b.y() - a.y() * b.x());
  const double texel = 1.0 / std::max(map.width(), map.height());
  if (!(uv_area > 0.0)) return 0.25;
  return std::clamp(texel / std::sqrt(2.0 * uv_area), kMinDeltaB, 0.25);
}

Vec3 displaced_normal(const Bary& b, const Prism& p, const DisplacementMap& map, double db,
                      bool* one_sided) {
  if (!(db > 0.0)) throw ContractError("displaced_normal: delta_b must be positive");
  // x moves weight from vertex 2 to vertex 0, y from vertex 2 to vertex 1.
  // Backward differences are used when the forward step leaves the triangle.
  bool flipped = false;
  auto step = [&](double toward) {
    if (b[2] >= db) return db;
    flipped = true;
    return toward >= db ? -db : db;
  };
  const double sx = step(b[0]);
  const double sy = step(b[1]);
  const Bary ba = b;
  const Bary bb(b[0] + sx, b[1], b[2] - sx);
  const Bary bc(b[0], b[1] + sy, b[2] - sy);
  const Vec3 n = interpolated_normal(p, b);
  auto surface = [&](const Bary& q) {
    const Vec2 uv = interpolate(q, p.uv[0], p.uv[1], p.uv[2]);
    Vec3 base = interpolate(q, p.v[0], p.v[1], p.v[2]);
    if (p.w_neg > 0.0) base += p.w_neg * interpolate(q, p.o[0], p.o[1], p.o[2]);
    return Vec3(base + n * map.sample(uv));
  };
  const Vec3 sa = surface(ba);
  const Vec3 tb = (surface(bb) - sa) * (sx > 0.0 ? 1.0 : -1.0);
  const Vec3 tc = (surface(bc) - sa) * (sy > 0.0 ? 1.0 : -1.0);
  if (one_sided) *one_sided = flipped;
  return normalized_or(tb.cross(tc), p.ng);
}

Vec3 correct_normal(const Vec3& n_s, const Vec3& n_g, const Vec3& n_interp,
                    NormalCorrection variant, bool* fallback) {
  if (fallback) *fallback = false;
  Vec3 r;
  switch (variant) {
    case NormalCorrection::kNone:
      return normalized_or(n_s, n_interp);
    case NormalCorrection::kRaw:
      r = n_s - n_g + n_interp;
      break;
    case NormalCorrection::kNormalizeFirst:
      r = normalized_or(n_s, n_g) - n_g + n_interp;
      break;
  }
  const double len = r.norm();
  if (!(len > 1e-12) || !std::isfinite(len)) {
    if (fallback) *fallback = true;
    return n_interp.normalized();
  }
  return r / len;
}

namespace {

constexpr double kShellTol = 1e-9;

}  // namespace

std::optional<HitRecord> march(const Ray& ray, const Prism& p, const IntervalHit& iv,
                               const DisplacementMap& map, const MarchOptions& opts,
                               MarchStats* stats, const MarchObserver* observer) {
  const double dt = opts.dt;
  if (!(dt > 0.0)) throw ContractError("march: dt must be positive");
  const double t_lo = iv.t_min;
  const double t_hi = iv.t_max;
  const int count = march_sample_count(t_lo, t_hi, dt);
  const double sign = opts.exit_mode ? -1.0 : 1.0;
  const double wtol = kShellTol * p.w_max;

  double t = std::min(t_lo + opts.jitter * dt, t_hi);
  MarchState st = init_march_state(p, ray.at(t), t, dt);
  double lambda = p.ng.dot(st.c[0] - p.v[0]);
  bool armed = !(opts.leave_surface &&
                 (iv.entered_inside || iv.t_min <= ray.t_near + opts.leave_distance));
  bool have_prev = false;
  double g_prev = 0.0;
  double t_prev = 0.0;
  if (stats) ++stats->marches;

  for (int k = 0; k < count; ++k) {
    if (k > 0) {
      t = std::min(t_lo + (opts.jitter + k) * dt, t_hi);
      st.t = t;
      st.s = ray.at(t);
      const double dh = p.ng.dot(st.c[0] - st.s);
      for (int i = 0; i < 3; ++i) st.c[i] -= p.o[i] * dh;
      lambda -= dh;
    }
    st.step = k;
    const Bary b = triangle_barycentric(st.s, st.c[0], st.c[1], st.c[2]);
    st.b = b;
    st.in_shell = b.minCoeff() >= -kShellTol && lambda >= -wtol && lambda <= p.w_max + wtol;
    const Vec3 base = b[0] * p.v[0] + b[1] * p.v[1] + b[2] * p.v[2];
    double h_ray = (st.s - base).norm();
    if (lambda < 0.0) h_ray = -h_ray;
    if (p.w_neg > 0.0) h_ray -= p.w_neg * (b[0] * p.o[0] + b[1] * p.o[1] + b[2] * p.o[2]).norm();
    st.h_ray = h_ray;
    st.uv = b[0] * p.uv[0] + b[1] * p.uv[1] + b[2] * p.uv[2];
    st.h_surf = map.sample(st.uv);
    if (stats) ++stats->samples;
    if (observer) (*observer)(st);

    if (!st.in_shell) {
      have_prev = false;
      continue;
    }
    const double g = sign * (st.h_ray - st.h_surf);
    if (g > 0.0) {
      armed = true;
      have_prev = true;
      g_prev = g;
      t_prev = t;
      continue;
    }
    std::optional<double> t_hit;
    if (have_prev && g_prev > 0.0) {
      const double span = t - t_prev;
      t_hit = span > 0.0 ? interpolate_crossing(t_prev, span, g_prev, g) : t;
    } else if (armed) {
      t_hit = t;
    }
    have_prev = true;
    g_prev = g;
    t_prev = t;
    if (!t_hit) continue;

    HitRecord hit;
    hit.t = *t_hit;
    hit.point = ray.at(hit.t);
    MarchState fin = st;
    fin.s = hit.point;
    advance_scanning_triangle(fin, p);
    Bary hb = triangle_barycentric(hit.point, fin.c[0], fin.c[1], fin.c[2]);
    hb = hb.cwiseMax(0.0);
    hb /= hb.sum();
    hit.b = hb;
    hit.uv = interpolate(hb, p.uv[0], p.uv[1], p.uv[2]);
    if (opts.color && opts.color->valid() && opts.color->sample(hit.uv)[3] < kAlphaCutout) continue;
    hit.prism_id = p.face_id;
    hit.geo_normal = p.ng;
    hit.interp_normal = interpolated_normal(p, hb);
    if (opts.compute_normal) {
      const double db = opts.delta_b > 0.0 ? opts.delta_b : default_delta_b(p, map);
      hit.raw_normal = displaced_normal(hb, p, map, db, &hit.fd_one_sided);
      hit.normal = correct_normal(hit.raw_normal, p.ng, hit.interp_normal, opts.correction,
                                  &hit.correction_fallback);
    } else {
      hit.raw_normal = hit.normal = hit.interp_normal;
    }
    return hit;
  }
  return std::nullopt;
}

std::optional<HitRecord> intersect_prism(const Ray& ray, const Prism& prism,
                                         const DisplacementMap& map, const MarchOptions& opts,
                                         MarchStats* stats, const MarchObserver* observer) {
  const auto iv = prism_entry_exit(ray, prism);
  if (!iv) return std::nullopt;
  return march(ray, prism, *iv, map, opts, stats, observer);
}

}  // namespace pdm
