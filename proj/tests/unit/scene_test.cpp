// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "pdm/error.h"
#include "pdm/scene.h"
#include "test_util.h"

namespace pdm {
namespace {

TEST(SceneJsonTest, ParsesFullDescription) {
  const SceneDescription d = parse_scene(R"({
    "name": "t", "mesh": "m.obj",
    "displacement": {"path": "h.png", "world_scale": 0.2, "world_bias": -0.01},
    "wmax": {"policy": "per_prism"}, "w_neg": 0.02, "dt": 0.001,
    "crease": {"split": false, "threshold_deg": 7},
    "material": {"diffuse": [0.1, 0.2, 0.3], "reflectivity": 0.25, "ior": 1.3},
    "lights": [{"position": [1, 2, 3], "intensity": [4, 5, 6]}],
    "camera": {"position": [0, 0, 5], "fov_deg": 30, "width": 64, "height": 32},
    "render": {"spp": 4, "path_depth": 3, "exposure": 2.0},
    "seed": 9
  })", "/base");
  EXPECT_EQ(d.mesh, "m.obj");
  EXPECT_EQ(d.displacement, "h.png");
  EXPECT_DOUBLE_EQ(d.world_scale, 0.2);
  EXPECT_DOUBLE_EQ(d.world_bias, -0.01);
  EXPECT_EQ(d.wmax_policy, WmaxPolicy::kPerPrism);
  EXPECT_FALSE(d.wmax);
  EXPECT_DOUBLE_EQ(d.w_neg, 0.02);
  EXPECT_FALSE(d.split_creases);
  EXPECT_DOUBLE_EQ(d.crease_threshold_deg, 7.0);
  EXPECT_DOUBLE_EQ(d.material.diffuse.y(), 0.2);
  ASSERT_EQ(d.lights.size(), 1u);
  EXPECT_DOUBLE_EQ(d.lights[0].intensity.z(), 6.0);
  EXPECT_EQ(d.camera.width, 64);
  EXPECT_EQ(d.spp, 4);
  EXPECT_EQ(d.seed, 9u);
  EXPECT_EQ(d.resolve("h.png"), std::filesystem::path("/base/h.png"));
}

TEST(SceneJsonTest, RoundTripsThroughJson) {
  SceneDescription a = parse_scene(R"({"mesh": "m.obj", "wmax": 0.3, "dt": 0.004,
    "lights": [{"position": [1, 2, 3]}], "render": {"spp": 2}})");
  const SceneDescription b = parse_scene(scene_to_json(a));
  EXPECT_EQ(b.mesh, a.mesh);
  ASSERT_TRUE(b.wmax);
  EXPECT_DOUBLE_EQ(*b.wmax, 0.3);
  EXPECT_DOUBLE_EQ(b.dt, a.dt);
  EXPECT_EQ(b.spp, 2);
  EXPECT_EQ(b.camera, a.camera);
  ASSERT_EQ(b.lights.size(), 1u);
}

TEST(SceneJsonTest, RejectsBadInput) {
  EXPECT_THROW(parse_scene("{"), ParseError);
  EXPECT_THROW(parse_scene("[]"), ValidationError);
  EXPECT_THROW(parse_scene(R"({})"), ValidationError);
  EXPECT_THROW(parse_scene(R"({"mesh": "m", "dt": 0})"), ValidationError);
  EXPECT_THROW(parse_scene(R"({"mesh": "m", "wmax": {"policy": "odd"}})"), ValidationError);
  EXPECT_THROW(parse_scene(R"({"mesh": "m", "render": {"spp": 0}})"), ValidationError);
  EXPECT_THROW(parse_scene(R"({"mesh": "m", "background": [1, 2]})"), ValidationError);
  EXPECT_THROW(load_scene_description("/nonexistent/scene.json"), IoError);
}

TEST(SceneTest, DemoSceneLoadsAndRespectsBounds) {
  const auto desc = load_scene_description(test::source_dir() / "scenes/orb/orb.json");
  const Scene s = build_scene(desc);
  ASSERT_TRUE(s.built());
  EXPECT_TRUE(s.color);
  EXPECT_EQ(s.geometry->prisms.size(), s.geometry->mesh.face_count());
  const BoundsReport r = check_bounds(s);
  EXPECT_TRUE(r.ok) << r.message;
  EXPECT_EQ(r.violating_prisms, 0u);
}

TEST(SceneTest, TraceMatchesLinearAndFindsSphere) {
  const Scene s = test::small_orb();
  std::mt19937_64 rng(1);
  int hits = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 o = 3.0 * test::random_unit(rng);
    const Vec3 d = (0.6 * test::random_unit(rng) - o).normalized();
    const Ray ray = make_ray(o, d);
    const auto a = trace(s, ray);
    const auto b = trace_linear(s, ray);
    ASSERT_EQ(a.has_value(), b.has_value());
    if (!a) continue;
    ++hits;
    EXPECT_EQ(a->t, b->t);
    const double r = a->point.norm();
    EXPECT_GT(r, std::cos(kPi / 12.0) * std::cos(kPi / 8.0) - 0.01);
    EXPECT_LT(r, 1.0 + s.map->max_height() + 0.02);
    EXPECT_EQ(occluded(s, make_ray(o, d, 0.0, a->t * 1.01)), true);
  }
  EXPECT_GT(hits, 100);
}

TEST(SceneTest, GlobalWmaxTooSmallIsReported) {
  const DisplacementMap map(8, 8, 0.1, 0.0, 65535);
  GeometryOptions go;
  go.wmax = 0.05;
  const Scene s = make_scene(make_uv_sphere(8, 6), map, go, 0.002);
  const BoundsReport r = check_bounds(s);
  EXPECT_FALSE(r.ok);
  EXPECT_GT(r.violating_prisms, 0u);
}

}  // namespace
}  // namespace pdm
