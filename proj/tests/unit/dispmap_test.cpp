// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "pdm/dispmap.h"
#include "pdm/error.h"

namespace pdm {
namespace {

Vec2 texel_center(int x, int y, int w, int h) { return Vec2((x + 0.5) / w, (y + 0.5) / h); }

TEST(DisplacementMapTest, SamplesTexelCentresExactly) {
  DisplacementMap map(8, 4, 2.0, -0.5);
  std::mt19937_64 rng(1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) map.set_texel(x, y, static_cast<std::uint16_t>(rng() & 0xffff));
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) {
      EXPECT_DOUBLE_EQ(map.sample_normalized(texel_center(x, y, 8, 4)), map.normalized(x, y));
      EXPECT_DOUBLE_EQ(map.sample(texel_center(x, y, 8, 4)), -0.5 + 2.0 * map.normalized(x, y));
    }
  EXPECT_DOUBLE_EQ(map.max_height(), 1.5);
}

TEST(DisplacementMapTest, BilinearMidpointAndClamp) {
  DisplacementMap map(2, 1, 1.0, 0.0);
  map.set_texel(0, 0, 0);
  map.set_texel(1, 0, 65535);
  EXPECT_NEAR(map.sample_normalized(Vec2(0.5, 0.5)), 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(map.sample_normalized(Vec2(-3.0, 0.5)), 0.0);
  EXPECT_DOUBLE_EQ(map.sample_normalized(Vec2(4.0, 0.5)), 1.0);
  EXPECT_EQ(map.texel(-5, 0), 0);
  EXPECT_EQ(map.texel(9, 9), 65535);
}

TEST(DisplacementMapTest, RejectsEmpty) { EXPECT_THROW(DisplacementMap(0, 4, 1.0, 0.0), ValidationError); }

TEST(TiledImageTest, CopyOnWriteSharesUntouchedTiles) {
  DisplacementMap a(256, 256, 1.0, 0.0);
  DisplacementMap b = a;
  const std::size_t tiles = (256 / 64) * (256 / 64);
  EXPECT_EQ(b.texels().shared_tiles(a.texels()), tiles);
  b.set_texel(10, 10, 7);
  EXPECT_EQ(b.texels().shared_tiles(a.texels()), tiles - 1);
  EXPECT_EQ(a.texel(10, 10), 0);
  EXPECT_EQ(b.texel(10, 10), 7);
}

TEST(BrushTest, WeightFalloffs) {
  Brush b;
  b.radius = 10.0;
  b.falloff = Falloff::kHard;
  EXPECT_EQ(brush_weight(b, 9.9), 1.0);
  EXPECT_EQ(brush_weight(b, 10.1), 0.0);
  b.falloff = Falloff::kLinear;
  EXPECT_DOUBLE_EQ(brush_weight(b, 5.0), 0.5);
  b.falloff = Falloff::kSmoothstep;
  EXPECT_DOUBLE_EQ(brush_weight(b, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(brush_weight(b, 5.0), 0.5);
  EXPECT_DOUBLE_EQ(brush_weight(b, 10.0), 0.0);
}

TEST(BrushTest, ValidatesParameters) {
  Brush b;
  b.radius = 0.5;
  EXPECT_THROW(validate_brush(b), ValidationError);
  b.radius = 4.0;
  b.strength = 1.5;
  EXPECT_THROW(validate_brush(b), ValidationError);
}

TEST(BrushTest, DirtyRectCoversEveryChangedTexel) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    DisplacementMap map(64, 48, 1.0, 0.0, 1000);
    const DisplacementMap before = map;
    Brush b;
    b.radius = 1.0 + 12.0 * u01(rng);
    b.strength = 2.0 * u01(rng) - 1.0;
    b.mode = static_cast<BlendMode>(trial % 3);
    b.falloff = static_cast<Falloff>((trial / 3) % 3);
    const Vec2 uv(1.2 * u01(rng) - 0.1, 1.2 * u01(rng) - 0.1);
    const DirtyRect r = apply_brush(map, uv, b);
    EXPECT_TRUE(r.empty() || (DirtyRect{0, 0, 64, 48}.intersect(r) == r));
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x)
        if (map.texel(x, y) != before.texel(x, y)) {
          EXPECT_TRUE(r.contains(x, y)) << x << "," << y;
        }
  }
}

TEST(BrushTest, AddRaisesCentreAndRegionMax) {
  DisplacementMap map(32, 32, 0.5, 0.1);
  Brush b;
  b.radius = 4.0;
  b.strength = 0.25;
  const DirtyRect r = apply_brush(map, texel_center(16, 16, 32, 32), b);
  EXPECT_EQ(r, (DirtyRect{12, 12, 21, 21}));
  EXPECT_NEAR(map.normalized(16, 16), 0.25, 1.0 / 65535.0);
  EXPECT_NEAR(region_max(map, r), 0.25, 1.0 / 65535.0);
  EXPECT_TRUE(exceeds_bound(map, r, 0.2));
  EXPECT_FALSE(exceeds_bound(map, r, 0.3));
}

TEST(BrushTest, ColorBrushOnlyWithColor) {
  ColorMap cm(16, 16);
  Brush b;
  b.radius = 3.0;
  EXPECT_TRUE(apply_color_brush(cm, Vec2(0.5, 0.5), b).empty());
  b.color = Rgba8{255, 0, 0, 255};
  b.strength = 1.0;
  b.falloff = Falloff::kHard;
  const DirtyRect r = apply_color_brush(cm, Vec2(0.5, 0.5), b);
  EXPECT_FALSE(r.empty());
  EXPECT_EQ(cm.texel(8, 8)[1], 0);
}

TEST(DirtyRectTest, UniteAndIntersect) {
  const DirtyRect a{0, 0, 4, 4}, b{2, 2, 6, 8}, e{};
  EXPECT_EQ(a.unite(b), (DirtyRect{0, 0, 6, 8}));
  EXPECT_EQ(a.intersect(b), (DirtyRect{2, 2, 4, 4}));
  EXPECT_EQ(a.unite(e), a);
  EXPECT_EQ(e.unite(a), a);
  EXPECT_TRUE(a.intersect(DirtyRect{5, 5, 6, 6}).empty());
  EXPECT_EQ(b.area(), 24);
}

}  // namespace
}  // namespace pdm
