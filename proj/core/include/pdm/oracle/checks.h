// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pdm/scene.h"

namespace pdm::oracle {

struct CheckResult {
  std::string name;
  bool pass = true;
  bool skipped = false;
  std::uint64_t tested = 0;
  std::uint64_t failed = 0;
  std::string detail;
};

/// Every displacement the map can produce fits its prism.
CheckResult check_prism_bounds(const Scene& scene);

/// Shell points of random prisms lie on the interpolated normal line and inside the prism.
CheckResult check_containment(const Scene& scene, std::uint64_t samples, std::uint64_t seed);

/// Rays aimed at random base-mesh points must hit the displaced surface.
/// Only meaningful for closed meshes with non-negative displacement.
CheckResult check_watertight(const Scene& scene, std::uint64_t rays, std::uint64_t seed);

/// Two prisms sharing a side patch report the same crossing t.
CheckResult check_shared_patches(const Scene& scene, std::uint64_t rays, std::uint64_t seed,
                                 double tol = 1e-6);

struct TessellationCheck {
  CheckResult result;
  double agreement = 0.0;
  double mean_abs_dt = 0.0;
  double max_abs_dt = 0.0;
  std::uint64_t hits = 0;
};

/// Hit/miss and t agreement against a micro-triangle tessellation of the displaced surface.
/// n = 0 picks a subdivision that keeps the tessellation near four million triangles.
TessellationCheck check_tessellation(const Scene& scene, std::uint64_t rays, std::uint64_t seed,
                                     int n = 0, double min_agreement = 0.99);

std::vector<CheckResult> run_all_checks(const Scene& scene, std::uint64_t rays, std::uint64_t seed);

}  // namespace pdm::oracle
