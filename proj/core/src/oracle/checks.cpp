// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/oracle/checks.h"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "pdm/oracle/inside.h"
#include "pdm/oracle/tessellation.h"

namespace pdm::oracle {
namespace {

Bary random_bary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double a = u01(rng);
  double b = u01(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return Bary(a, b, 1.0 - a - b);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 d;
  do d = Vec3(g(rng), g(rng), g(rng));
  while (d.squaredNorm() < 1e-12);
  return d.normalized();
}

Vec3 mesh_center(const BaseMesh& mesh) {
  Aabb b;
  for (const Vec3& v : mesh.vertices) b.extend(v);
  return b.centroid();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Edge {
  Vec3 a, b;    // bottom corners in patch order
  Vec3 oa, ob;  // offset directions
};

Edge patch_edge(const Prism& p, int k) {
  const SidePatch sp = side_patch(p, k);
  const int k1 = (k + 1) % 3;
  return sp.flipped ? Edge{sp.q[0], sp.q[1], p.o[k1], p.o[k]} : Edge{sp.q[0], sp.q[1], p.o[k], p.o[k1]};
}

using EdgeKey = std::array<double, 6>;

EdgeKey edge_key(const Edge& e) { return {e.a.x(), e.a.y(), e.a.z(), e.b.x(), e.b.y(), e.b.z()}; }

// Both patches span the same surface when the offsets agree up to one common scale.
std::optional<double> coincident_scale(const Edge& x, const Edge& y) {
  const double k = y.oa.norm() / x.oa.norm();
  const double tol = 1e-12 * k;
  if ((y.oa - k * x.oa).norm() > tol * x.oa.norm() || (y.ob - k * x.ob).norm() > tol * x.ob.norm())
    return std::nullopt;
  return k;
}

std::optional<double> patch_crossing(const Ray& ray, const Prism& p, int k, double target) {
  BoundaryHits hits;
  const int n = prism_boundary_hits(ray, p, hits);
  const Boundary want = static_cast<Boundary>(static_cast<int>(Boundary::kPatch0) + k);
  std::optional<double> best;
  for (int i = 0; i < n; ++i) {
    if (hits[i].kind != want) continue;
    if (!best || std::abs(hits[i].t - target) < std::abs(*best - target)) best = hits[i].t;
  }
  return best;
}

}  // namespace

CheckResult check_prism_bounds(const Scene& scene) {
  CheckResult r;
  r.name = "bounds";
  const BoundsReport b = check_bounds(scene);
  r.tested = scene.geometry->prisms.size();
  r.failed = b.violating_prisms;
  r.pass = b.ok;
  if (!b.ok)
    r.detail = b.message;
  else if (scene.geometry->policy == WmaxPolicy::kPerPrism)
    r.detail = "per-prism w_max, smallest " + fmt(b.min_wmax);
  else
    r.detail = "max height " + fmt(b.max_height) + " <= w_max " + fmt(b.min_wmax);
  return r;
}

CheckResult check_containment(const Scene& scene, std::uint64_t samples, std::uint64_t seed) {
  CheckResult r;
  r.name = "containment";
  const auto& prisms = scene.geometry->prisms;
  std::mt19937_64 rng(seed ^ 0xC0A7A1u);
  std::uniform_int_distribution<std::size_t> pick(0, prisms.size() - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double worst = 0.0;
  std::uint64_t outside = 0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const Prism& p = prisms[pick(rng)];
    const Bary b = random_bary(rng);
    const double w = u01(rng) * p.w_max;
    const Vec3 x = shell_point(p, b, w);
    const Vec3 d = x - base_point(p, b);
    const Vec3 n = interpolated_normal(p, b);
    const double len = d.norm();
    if (len > 0.0) {
      const double res = (d - d.dot(n) * n).norm() / len;
      worst = std::max(worst, res);
      if (res >= 1e-9) ++r.failed;
    }
    const Vec3 inner = shell_point(p, b, std::clamp(w, 1e-6 * p.w_max, p.w_max * (1.0 - 1e-6)));
    if (!point_in_prism(p, inner)) ++outside;
  }
  r.tested = samples;
  r.failed += outside;
  r.pass = r.failed == 0;
  r.detail = "max colinearity residual " + fmt(worst) + ", outside " + std::to_string(outside);
  return r;
}

CheckResult check_watertight(const Scene& scene, std::uint64_t rays, std::uint64_t seed) {
  CheckResult r;
  r.name = "watertight";
  const Geometry& g = *scene.geometry;
  const BoundsReport b = check_bounds(scene);
  if (b.min_height < 0.0) {
    r.skipped = true;
    r.detail = "skipped: displacement can go below the base mesh";
    return r;
  }
  const Vec3 c = mesh_center(g.mesh);
  std::mt19937_64 rng(seed ^ 0x3A7E27u);
  std::uniform_int_distribution<std::size_t> pick(0, g.mesh.faces.size() - 1);
  const double radius = 2.0 * g.radius + 4.0 * b.max_height;
  TraceOptions opts;
  opts.compute_normal = false;
  for (std::uint64_t i = 0; i < rays; ++i) {
    const std::size_t f = pick(rng);
    const Bary bb = random_bary(rng);
    const Vec3 target = bb[0] * g.mesh.position(f, 0) + bb[1] * g.mesh.position(f, 1) +
                        bb[2] * g.mesh.position(f, 2);
    const Vec3 origin = c + radius * random_unit(rng);
    const Ray ray = make_ray(origin, target - origin);
    if (!trace(scene, ray, opts)) ++r.failed;
  }
  r.tested = rays;
  r.pass = r.failed == 0;
  r.detail = std::to_string(r.failed) + " leaks";
  if (b.min_height < scene.dt) r.detail += " (bias below dt)";
  return r;
}

CheckResult check_shared_patches(const Scene& scene, std::uint64_t rays, std::uint64_t seed,
                                 double tol) {
  CheckResult r;
  r.name = "shared-patch";
  const auto& prisms = scene.geometry->prisms;
  struct Pair {
    std::uint32_t pa, pb;
    int ka, kb;
    double top;  // shared height along prism a's offsets
  };
  std::map<EdgeKey, std::vector<std::pair<std::uint32_t, int>>> owners;
  for (std::uint32_t i = 0; i < prisms.size(); ++i)
    for (int k = 0; k < 3; ++k) owners[edge_key(patch_edge(prisms[i], k))].push_back({i, k});
  std::vector<Pair> shared;
  std::size_t non_coincident = 0;
  for (const auto& [key, list] : owners) {
    if (list.size() != 2) continue;
    const Edge ea = patch_edge(prisms[list[0].first], list[0].second);
    const Edge eb = patch_edge(prisms[list[1].first], list[1].second);
    const auto k = coincident_scale(ea, eb);
    if (!k) {
      ++non_coincident;
      continue;
    }
    const double top = std::min(prisms[list[0].first].w_max, prisms[list[1].first].w_max * *k);
    shared.push_back({list[0].first, list[1].first, list[0].second, list[1].second, top});
  }
  if (shared.empty()) {
    r.skipped = true;
    r.detail = "skipped: no coincident side patches (" + std::to_string(non_coincident) + " edges differ)";
    return r;
  }
  std::mt19937_64 rng(seed ^ 0x5A7C4u);
  std::uniform_int_distribution<std::size_t> pick(0, shared.size() - 1);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double reach = 2.0 * scene.geometry->radius;
  double worst = 0.0;
  std::uint64_t missing = 0;
  for (std::uint64_t i = 0; i < rays; ++i) {
    const Pair& pair = shared[pick(rng)];
    const Edge e = patch_edge(prisms[pair.pa], pair.ka);
    const double s = 0.02 + 0.96 * u01(rng);
    const double h = (0.02 + 0.96 * u01(rng)) * pair.top;
    const Vec3 x = (1 - s) * (e.a + h * e.oa) + s * (e.b + h * e.ob);
    const Vec3 d = random_unit(rng);
    const Ray ray = make_ray(x - reach * d, d);
    const auto ta = patch_crossing(ray, prisms[pair.pa], pair.ka, reach);
    const auto tb = patch_crossing(ray, prisms[pair.pb], pair.kb, reach);
    ++r.tested;
    if (ta.has_value() != tb.has_value()) {
      ++missing;
      ++r.failed;
      continue;
    }
    if (!ta) continue;
    const double diff = std::abs(*ta - *tb);
    worst = std::max(worst, diff);
    if (diff > tol) ++r.failed;
  }
  r.pass = r.failed == 0;
  r.detail = std::to_string(shared.size()) + " patches, max |dt| " + fmt(worst) + ", one-sided " +
             std::to_string(missing);
  if (non_coincident) r.detail += ", " + std::to_string(non_coincident) + " non-coincident edges";
  return r;
}

TessellationCheck check_tessellation(const Scene& scene, std::uint64_t rays, std::uint64_t seed,
                                     int n, double min_agreement) {
  TessellationCheck out;
  CheckResult& r = out.result;
  r.name = "tessellation";
  const Geometry& g = *scene.geometry;
  if (n <= 0) {
    const double f = static_cast<double>(g.mesh.faces.size());
    n = std::clamp(static_cast<int>(std::sqrt(4.0e6 / f)), 8, 64);
  }
  const Tessellation tess = Tessellation::build(g.mesh, *scene.map, n, DisplaceAlong::kOffsetDirection);
  const Vec3 c = mesh_center(g.mesh);
  const double outer = 2.0 * g.radius;
  std::mt19937_64 rng(seed ^ 0x7E55u);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  TraceOptions opts;
  opts.compute_normal = false;
  std::uint64_t agree = 0, bad_t = 0;
  double sum = 0.0;
  for (std::uint64_t i = 0; i < rays; ++i) {
    const Vec3 origin = c + outer * random_unit(rng);
    const Vec3 target = c + 0.9 * g.radius * std::cbrt(u01(rng)) * random_unit(rng);
    const Ray ray = make_ray(origin, target - origin);
    const auto a = trace(scene, ray, opts);
    const auto b = tess.intersect(ray);
    if (a.has_value() != b.has_value()) continue;
    ++agree;
    if (!a) continue;
    const double diff = std::abs(a->t - b->t);
    ++out.hits;
    sum += diff;
    out.max_abs_dt = std::max(out.max_abs_dt, diff);
    if (diff > 2.0 * scene.dt) ++bad_t;
  }
  r.tested = rays;
  out.agreement = rays ? static_cast<double>(agree) / rays : 1.0;
  out.mean_abs_dt = out.hits ? sum / out.hits : 0.0;
  r.failed = (rays - agree) + bad_t;
  r.pass = out.agreement >= min_agreement && bad_t == 0;
  r.detail = "n=" + std::to_string(n) + ", agreement " + fmt(100.0 * out.agreement) + "%, mean |dt| " +
             fmt(out.mean_abs_dt) + ", max |dt| " + fmt(out.max_abs_dt);
  return out;
}

std::vector<CheckResult> run_all_checks(const Scene& scene, std::uint64_t rays, std::uint64_t seed) {
  std::vector<CheckResult> out;
  out.push_back(check_prism_bounds(scene));
  out.push_back(check_containment(scene, rays, seed));
  out.push_back(check_watertight(scene, rays, seed));
  out.push_back(check_shared_patches(scene, rays, seed));
  out.push_back(check_tessellation(scene, std::min<std::uint64_t>(rays, 10000), seed).result);
  return out;
}

}  // namespace pdm::oracle
