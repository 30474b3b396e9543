// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>

#include "pdm/dispmap.h"
#include "pdm/intersect.h"
#include "pdm/math.h"
#include "pdm/prism.h"

namespace pdm {

struct MarchState {
  double t = 0.0;
  Vec3 s = Vec3::Zero();
  std::array<Vec3, 3> c;  // scanning triangle
  double h_ray = 0.0;
  double h_surf = 0.0;
  double dt = 0.0;
  Bary b = Bary::Zero();
  Vec2 uv = Vec2::Zero();
  int step = 0;
  bool in_shell = true;
};

struct HitRecord {
  double t = 0.0;
  Vec3 point = Vec3::Zero();
  Bary b = Bary::Zero();
  Vec2 uv = Vec2::Zero();
  Vec3 normal = Vec3::UnitZ();      // corrected
  Vec3 raw_normal = Vec3::UnitZ();  // uncorrected
  Vec3 interp_normal = Vec3::UnitZ();
  Vec3 geo_normal = Vec3::UnitZ();
  std::uint32_t prism_id = 0;
  bool fd_one_sided = false;
  bool correction_fallback = false;
};

enum class NormalCorrection { kNormalizeFirst, kRaw, kNone };

struct MarchOptions {
  double dt = 0.002;
  double jitter = 0.0;  // R in [0, 1)
  // Ignore a start below the surface; accept only a later downward crossing.
  bool leave_surface = false;
  // With leave_surface, an entry closer than this to t_near also counts as a start below.
  double leave_distance = 0.0;
  // Find where the ray leaves the solid instead of where it enters it.
  bool exit_mode = false;
  const ColorMap* color = nullptr;  // alpha < 0.5 cuts holes
  NormalCorrection correction = NormalCorrection::kNormalizeFirst;
  double delta_b = 0.0;  // 0 selects one texel in barycentric units
  bool compute_normal = true;
};

struct MarchStats {
  std::uint64_t samples = 0;
  std::uint64_t marches = 0;
};

using MarchObserver = std::function<void(const MarchState&)>;

inline constexpr double kAlphaCutout = 0.5;
inline constexpr double kMinDeltaB = 1e-4;

/// Barycentric coordinates of s with respect to (c0, c1, c2), five dot products.
/// Throws ContractError for a degenerate triangle.
Bary triangle_barycentric(const Vec3& s, const Vec3& c0, const Vec3& c1, const Vec3& c2);

/// Scanning triangle through s: c_i = v_i + lambda o_i, lambda = N_g . (s - v_0).
MarchState init_march_state(const Prism& prism, const Vec3& s, double t, double dt);

/// Moves the scanning triangle into the plane through state.s.
void advance_scanning_triangle(MarchState& state, const Prism& prism);

/// Linear zero of f between t_prev and t_prev + dt. Requires f_prev > 0 >= f_curr.
double interpolate_crossing(double t_prev, double dt, double f_prev, double f_curr);

/// Sample count of a march over [t_min, t_max]; independent of jitter.
int march_sample_count(double t_min, double t_max, double dt);

/// Finite-difference displaced normal at b, unit length.
Vec3 displaced_normal(const Bary& b, const Prism& prism, const DisplacementMap& map, double delta_b,
                      bool* one_sided = nullptr);

double default_delta_b(const Prism& prism, const DisplacementMap& map);

/// normalize(N_s - N_g + N'), with N_s normalized first for kNormalizeFirst.
Vec3 correct_normal(const Vec3& n_s, const Vec3& n_g, const Vec3& n_interp,
                    NormalCorrection variant = NormalCorrection::kNormalizeFirst,
                    bool* fallback = nullptr);

/// Marches [interval.t_min, interval.t_max] for the displaced surface.
std::optional<HitRecord> march(const Ray& ray, const Prism& prism, const IntervalHit& interval,
                               const DisplacementMap& map, const MarchOptions& opts,
                               MarchStats* stats = nullptr, const MarchObserver* observer = nullptr);

/// prism_entry_exit followed by march.
std::optional<HitRecord> intersect_prism(const Ray& ray, const Prism& prism,
                                         const DisplacementMap& map, const MarchOptions& opts,
                                         MarchStats* stats = nullptr,
                                         const MarchObserver* observer = nullptr);

}  // namespace pdm
