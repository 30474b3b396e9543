// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "pdm/oracle/analytic.h"
#include "pdm/oracle/checks.h"
#include "pdm/oracle/inside.h"
#include "pdm/oracle/tessellation.h"
#include "test_util.h"

namespace pdm::oracle {
namespace {

TEST(OracleTest, PointInPrism) {
  const BaseMesh m = make_grid(1);
  const Prism p = build_prism(m, 0, 0.1);
  const Vec3 c = (p.v[0] + p.v[1] + p.v[2]) / 3.0;
  EXPECT_TRUE(point_in_prism(p, c + Vec3(0, 0, 0.05)));
  EXPECT_FALSE(point_in_prism(p, c + Vec3(0, 0, 0.15)));
  EXPECT_FALSE(point_in_prism(p, c - Vec3(0, 0, 0.01)));
  EXPECT_FALSE(point_in_prism(p, Vec3(5, 5, 0.05)));
}

TEST(OracleTest, BisectRoot) {
  EXPECT_NEAR(bisect_root([](double x) { return 2.0 - x * x; }, 0.0, 2.0, 60), std::sqrt(2.0), 1e-12);
}

TEST(OracleTest, TessellationHitsFlatPlaneAtHeight) {
  const BaseMesh m = make_grid(2);
  DisplacementMap map(8, 8, 0.1, 0.0, 32768);
  const Tessellation t = Tessellation::build(m, map, 4);
  EXPECT_EQ(t.triangle_count(), m.face_count() * 16);
  const auto hit = t.intersect(make_ray(Vec3(0.1, 0.2, 1.0), Vec3(0, 0, -1)));
  ASSERT_TRUE(hit);
  EXPECT_NEAR(1.0 - hit->t, map.sample(Vec2(0.5, 0.5)), 1e-12);
  EXPECT_NEAR(hit->normal.z(), 1.0, 1e-12);
}

TEST(OracleTest, DisplacedPointFollowsNormal) {
  const BaseMesh m = make_uv_sphere(8, 6);
  DisplacementMap map(8, 8, 0.2, 0.0, 65535);
  const Vec3 p = displaced_point(m, 3, Bary(1, 0, 0), map);
  EXPECT_NEAR(p.norm(), 1.2, 1e-9);
}

TEST(OracleTest, AnalyticFieldRasterizes) {
  DisplacementMap map(64, 64, 0.1, 0.0);
  const auto f = sinusoid(0.04, 0.05, 1.0, 1.0);
  rasterize(map, f);
  EXPECT_NEAR(map.sample(Vec2(0.3, 0.6)), f.value(Vec2(0.3, 0.6)), 2e-3);
}

TEST(OracleTest, ChecksPassOnSmallOrb) {
  const Scene s = test::small_orb();
  for (const CheckResult& r : run_all_checks(s, 2000, 3)) {
    EXPECT_TRUE(r.pass) << r.name << ": " << r.detail;
    EXPECT_FALSE(r.skipped) << r.name;
    EXPECT_GT(r.tested, 0u) << r.name;
  }
}

TEST(OracleTest, BoundsCheckFailsForShortShell) {
  const DisplacementMap map(8, 8, 0.1, 0.0, 65535);
  GeometryOptions go;
  go.wmax = 0.05;
  const Scene s = make_scene(make_uv_sphere(8, 6), map, go, 0.002);
  EXPECT_FALSE(check_prism_bounds(s).pass);
}

}  // namespace
}  // namespace pdm::oracle
