// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "pdm/error.h"
#include "pdm/march.h"
#include "pdm/oracle/analytic.h"
#include "pdm/prism.h"
#include "test_util.h"

namespace pdm {
namespace {

DisplacementMap constant_map(double height, double wmax) {
  DisplacementMap map(16, 16, wmax, 0.0);
  const auto v = static_cast<std::uint16_t>(std::lround(height / wmax * 65535.0));
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) map.set_texel(x, y, v);
  return map;
}

TEST(MarchHelpersTest, InterpolateCrossing) {
  EXPECT_DOUBLE_EQ(interpolate_crossing(1.0, 0.5, 1.0, -1.0), 1.25);
  EXPECT_DOUBLE_EQ(interpolate_crossing(0.0, 1.0, 2.0, 0.0), 1.0);
  EXPECT_THROW(interpolate_crossing(0.0, 1.0, -1.0, -2.0), ContractError);
}

TEST(MarchHelpersTest, SampleCount) {
  EXPECT_EQ(march_sample_count(0.0, 1.0, 0.1), 11);
  EXPECT_EQ(march_sample_count(0.0, 0.0, 0.1), 2);
  EXPECT_EQ(march_sample_count(0.0, 1.05, 0.1), 12);
}

TEST(MarchHelpersTest, TriangleBarycentric) {
  const Vec3 a(0, 0, 0), b(1, 0, 0), c(0, 1, 0);
  const Bary w = triangle_barycentric(Vec3(0.2, 0.3, 0.7), a, b, c);
  EXPECT_NEAR(w[0], 0.5, 1e-14);
  EXPECT_NEAR(w[1], 0.2, 1e-14);
  EXPECT_NEAR(w[2], 0.3, 1e-14);
}

TEST(MarchTest, FlatPlaneHitIsExact) {
  const BaseMesh m = make_grid(1);
  const double wmax = 0.2, height = 0.05;
  const DisplacementMap map = constant_map(height, wmax);
  const double h = map.sample(Vec2(0.5, 0.5));
  const Prism p = build_prism(m, 0, wmax);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Bary b = 0.1 + 0.8 * test::random_bary(rng).array();
    const Vec3 target = base_point(p, b / b.sum()) + Vec3(0, 0, h);
    Vec3 d = test::random_unit(rng);
    if (d.z() > -0.2) d = Vec3(d.x(), d.y(), -0.2 - std::abs(d.z())).normalized();
    const Ray ray = make_ray(target - 2.0 * d, d);
    MarchOptions o;
    o.dt = 0.01;
    const auto hit = intersect_prism(ray, p, map, o);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->point.z(), h, 1e-12);
    EXPECT_NEAR(hit->t, 2.0, 1e-9);
    EXPECT_LT((hit->normal - Vec3::UnitZ()).norm(), 1e-9);
  }
}

TEST(MarchTest, RayAboveSurfaceMisses) {
  const BaseMesh m = make_grid(1);
  const Prism p = build_prism(m, 0, 0.2);
  const DisplacementMap map = constant_map(0.05, 0.2);
  MarchOptions o;
  o.dt = 0.01;
  MarchStats stats;
  const Ray ray = make_ray(Vec3(-0.5, -0.9, 0.1), Vec3(1, 1, 0).normalized());
  EXPECT_FALSE(intersect_prism(ray, p, map, o, &stats));
  EXPECT_EQ(stats.marches, 1u);
  EXPECT_GT(stats.samples, 0u);
}

TEST(MarchTest, ObserverSeesMonotoneSteps) {
  const BaseMesh m = make_grid(1);
  const Prism p = build_prism(m, 0, 0.2);
  const DisplacementMap map = constant_map(0.05, 0.2);
  std::vector<MarchState> seen;
  const MarchObserver obs = [&](const MarchState& s) { seen.push_back(s); };
  MarchOptions o;
  o.dt = 0.005;
  const Ray ray = make_ray(Vec3(0.5, -0.5, 0.5), Vec3(0, 0, -1));
  ASSERT_TRUE(intersect_prism(ray, p, map, o, nullptr, &obs));
  ASSERT_GE(seen.size(), 2u);
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_GT(seen[i].t, seen[i - 1].t);
  EXPECT_GT(seen.front().h_ray, seen.front().h_surf);
  EXPECT_LE(seen.back().h_ray, seen.back().h_surf + 1e-12);
}

TEST(MarchTest, JitterOnlyShiftsSamples) {
  const BaseMesh m = make_grid(1);
  const Prism p = build_prism(m, 0, 0.2);
  const DisplacementMap map = constant_map(0.05, 0.2);
  const Ray ray = make_ray(Vec3(0.5, -0.5, 0.5), Vec3(0.1, 0.0, -1).normalized());
  for (double j : {0.0, 0.3, 0.99}) {
    MarchOptions o;
    o.dt = 0.02;
    o.jitter = j;
    const auto hit = intersect_prism(ray, p, map, o);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->point.z(), map.sample(Vec2(0.5, 0.5)), 1e-12);
  }
}

TEST(NormalTest, CorrectionVariants) {
  const Vec3 ng = Vec3::UnitZ();
  const Vec3 ni = Vec3(0.3, 0.0, 1.0).normalized();
  EXPECT_LT((correct_normal(ng, ng, ni) - ni).norm(), 1e-15);
  EXPECT_LT((correct_normal(2.0 * ng, ng, ni, NormalCorrection::kNormalizeFirst) - ni).norm(), 1e-15);
  EXPECT_LT((correct_normal(Vec3(0, 1, 1), ng, ni, NormalCorrection::kNone) - Vec3(0, 1, 1).normalized()).norm(),
            1e-15);
  bool fallback = false;
  const Vec3 r = correct_normal(Vec3::Zero(), Vec3::Zero(), ni, NormalCorrection::kRaw, &fallback);
  EXPECT_FALSE(fallback);
  EXPECT_LT((r - ni).norm(), 1e-15);
  correct_normal(ng - ni, ng, ni, NormalCorrection::kRaw, &fallback);
  EXPECT_TRUE(fallback);
}

TEST(NormalTest, RampMatchesAnalytic) {
  const BaseMesh m = make_grid(2);
  DisplacementMap map(256, 256, 0.1, 0.0);
  const auto field = oracle::ramp_u(0.05, 0.01);
  oracle::rasterize(map, field);
  std::mt19937_64 rng(6);
  for (std::size_t f = 0; f < m.face_count(); ++f) {
    const Prism p = build_prism(m, f, 0.1);
    for (int i = 0; i < 50; ++i) {
      Bary b = 0.05 + 0.85 * test::random_bary(rng).array();
      b /= b.sum();
      const Vec3 n = displaced_normal(b, p, map, default_delta_b(p, map));
      EXPECT_LT(oracle::angle_deg(n, oracle::analytic_displaced_normal(p, b, field)), 0.05);
    }
  }
}

TEST(NormalTest, RejectsNonPositiveStep) {
  const BaseMesh m = make_grid(1);
  const Prism p = build_prism(m, 0, 0.1);
  const DisplacementMap map(4, 4, 0.1, 0.0);
  EXPECT_THROW(displaced_normal(Bary(0.3, 0.3, 0.4), p, map, 0.0), ContractError);
}

}  // namespace
}  // namespace pdm
