// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "pdm/intersect.h"
#include "pdm/prism.h"

namespace pdm::oracle {

/// Point-in-prism by height and barycentric test: lambda = N_g . (x - v_0) in
/// [0, w_max] and x inside the offset triangle at that height.
bool point_in_prism(const Prism& prism, const Vec3& x);

struct DenseClassification {
  bool any_inside = false;
  double first_inside = 0.0;  // first boundary crossing into the prism (or segment start)
  double last_inside = 0.0;   // last boundary crossing out of the prism (or segment end)
  int runs = 0;               // number of inside runs
  long long samples = 0;
};

/// Samples the ray inside the prism's box every coarse_step and locates each
/// inside/outside transition to within step by bisection.
/// Sorted t values in [lo, hi] where the ray crosses the bottom or top plane or a
/// scanning-triangle edge line. Inside/outside is constant between consecutive values.
std::vector<double> prism_breakpoints(const Ray& ray, const Prism& prism, double lo, double hi);

/// Point-sampled classification of the ray against the prism: a coarse grid (plus one probe
/// between each pair of breakpoints when seeded), each transition bisected to step / 4.
DenseClassification dense_classify(const Ray& ray, const Prism& prism, double step, double coarse_step,
                                   bool seed_breakpoints = true);

}  // namespace pdm::oracle
