// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/oracle/inside.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdm::oracle {

bool point_in_prism(const Prism& p, const Vec3& x) {
  const double lambda = p.ng.dot(x - p.v[0]);
  if (lambda < 0.0 || lambda > p.w_max) return false;
  std::array<Vec3, 3> c;
  for (int k = 0; k < 3; ++k) c[k] = p.v[k] + lambda * p.o[k];
  const Vec3 x0 = c[1] - c[0];
  const Vec3 x1 = c[2] - c[0];
  const Vec3 x2 = x - c[0];
  const double d00 = x0.dot(x0), d01 = x0.dot(x1), d11 = x1.dot(x1);
  const double d20 = x2.dot(x0), d21 = x2.dot(x1);
  const double den = d00 * d11 - d01 * d01;
  const double b1 = (d11 * d20 - d01 * d21) / den;
  const double b2 = (d00 * d21 - d01 * d20) / den;
  return b1 >= 0.0 && b2 >= 0.0 && b1 + b2 <= 1.0;
}

namespace {

// Roots in [lo, hi] of the quadratic through (t0, f0), (t1, f1), (t2, f2) with equal spacing.
void quadratic_roots(double t0, double h, double f0, double f1, double f2, double lo, double hi,
                     std::vector<double>& out) {
  // f(t0 + s h) = a s^2 + b s + c
  const double a = 0.5 * (f2 - 2.0 * f1 + f0);
  const double b = f1 - f0 - a;
  const double c = f0;
  auto push = [&](double s) {
    const double t = t0 + s * h;
    if (t >= lo && t <= hi) out.push_back(t);
  };
  const double scale = std::abs(a) + std::abs(b) + std::abs(c);
  if (std::abs(a) <= 1e-14 * scale) {
    if (b != 0.0) push(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return;
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  push(q / a);
  if (q != 0.0) push(c / q);
}

}  // namespace

std::vector<double> prism_breakpoints(const Ray& ray, const Prism& p, double lo, double hi) {
  std::vector<double> out;
  const double dl = p.ng.dot(ray.dir);
  if (dl != 0.0) {
    for (double level : {0.0, p.w_max}) {
      const double t = (level - p.ng.dot(ray.origin - p.v[0])) / dl;
      if (t >= lo && t <= hi) out.push_back(t);
    }
  }
  const double h = 0.5 * (hi - lo);
  if (!(h > 0.0)) return out;
  for (int k = 0; k < 3; ++k) {
    const int k1 = (k + 1) % 3;
    auto edge = [&](double t) {
      const Vec3 x = ray.at(t);
      const double lambda = p.ng.dot(x - p.v[0]);
      const Vec3 ci = p.v[k] + lambda * p.o[k];
      const Vec3 cj = p.v[k1] + lambda * p.o[k1];
      return (cj - ci).cross(x - ci).dot(p.ng);
    };
    quadratic_roots(lo, h, edge(lo), edge(lo + h), edge(hi), lo, hi, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

DenseClassification dense_classify(const Ray& ray, const Prism& p, double step, double coarse_step,
                                   bool seed_breakpoints) {
  DenseClassification out;
  Aabb box = prism_aabb(p);
  const double pad = 4.0 * step;
  box.min.array() -= pad;
  box.max.array() += pad;
  double a, b;
  if (!ray_aabb(ray, inverse_dir(ray.dir), box, a, b)) return out;
  auto inside = [&](double t) {
    ++out.samples;
    return point_in_prism(p, ray.at(t));
  };
  auto refine = [&](double lo, double hi, bool lo_in) {
    while (hi - lo > 0.25 * step) {
      const double mid = 0.5 * (lo + hi);
      if (inside(mid) == lo_in) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };
  const long long n = std::max<long long>(1, static_cast<long long>(std::ceil((b - a) / coarse_step)));
  std::vector<double> ts;
  ts.reserve(static_cast<std::size_t>(n) + 16);
  for (long long k = 0; k <= n; ++k) ts.push_back(k == n ? b : a + k * coarse_step);
  if (seed_breakpoints) {
    std::vector<double> cuts = prism_breakpoints(ray, p, a, b);
    cuts.insert(cuts.begin(), a);
    cuts.push_back(b);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) ts.push_back(0.5 * (cuts[i] + cuts[i + 1]));
    std::sort(ts.begin(), ts.end());
  }
  double t_prev = ts.front();
  bool prev = inside(t_prev);
  if (prev) {
    out.any_inside = true;
    out.first_inside = t_prev;
    out.runs = 1;
  }
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double t = ts[k];
    const bool cur = inside(t);
    if (cur != prev) {
      const double tb = refine(t_prev, t, prev);
      if (cur) {
        if (!out.any_inside) out.first_inside = tb;
        out.any_inside = true;
        ++out.runs;
      } else {
        out.last_inside = tb;
      }
    }
    prev = cur;
    t_prev = t;
  }
  if (prev) out.last_inside = b;
  return out;
}

}  // namespace pdm::oracle
