// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pdm/camera.h"
#include "pdm/dispmap.h"
#include "pdm/image_io.h"
#include "pdm/scene.h"

namespace pdm {

/// Small PCG32 stream, one per pixel sample.
class Pcg32 {
 public:
  explicit Pcg32(std::uint64_t seed, std::uint64_t stream = 0x5851f42d4c957f2dULL);
  std::uint32_t next_u32();
  double next_double();  // [0, 1)

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

/// Seed of the stream for (pixel, sample index, seed).
std::uint64_t sample_seed(std::uint32_t pixel, std::uint32_t sample, std::uint64_t seed);

/// Linear RGB accumulation plus per-pixel sample counts.
class Framebuffer {
 public:
  Framebuffer() = default;
  Framebuffer(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  DirtyRect bounds() const { return {0, 0, width_, height_}; }

  void clear();
  void reset(const DirtyRect& rect);
  void add(int x, int y, const Vec3& rgb);

  Eigen::Vector3f accum(int x, int y) const;
  std::uint32_t count(int x, int y) const { return counts_[index(x, y)]; }
  /// accumulation / count, zero where count is 0.
  Vec3 mean(int x, int y) const;

  /// Mean radiance as float RGB, top row first.
  ImageF linear() const;
  /// exposure, then sRGB, as RGBA8; rect selects a sub-image.
  Image8 resolve(double exposure = 1.0) const;
  Image8 resolve(const DirtyRect& rect, double exposure = 1.0) const;

  const std::vector<float>& raw_accum() const { return accum_; }
  const std::vector<std::uint32_t>& raw_counts() const { return counts_; }

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }
  int width_ = 0, height_ = 0;
  std::vector<float> accum_;
  std::vector<std::uint32_t> counts_;
};

double srgb_encode(double linear);
std::uint8_t srgb_to_u8(double linear);

struct RenderSettings {
  int spp = 1;
  std::uint64_t seed = 0;
  int path_depth = 2;        // 1 = direct light only
  int reflection_depth = 2;  // reflection and refraction recursion cap
  bool primary_only = false;  // direct light with shadows, no secondary bounces
  bool shadows = true;
  bool jitter_pixels = true;
  bool jitter_march = true;
  int threads = 0;  // 0 = library default
  static constexpr int kTile = 32;
};

RenderSettings settings_from(const SceneDescription& desc);

struct RenderStats {
  std::uint64_t primary_rays = 0;
  std::uint64_t secondary_rays = 0;
  std::uint64_t march_samples = 0;
  std::uint64_t marches = 0;
  double total_ms = 0.0;
};

/// Radiance of one camera sample. Deterministic for fixed (pixel, sample, seed).
Vec3 render_sample(const Scene& scene, const Camera& camera, int x, int y, std::uint32_t sample,
                   const RenderSettings& settings, RenderStats* stats = nullptr);

/// Adds settings.spp samples to every pixel.
void render_frame(const Scene& scene, const Camera& camera, Framebuffer& fb,
                  const RenderSettings& settings, RenderStats* stats = nullptr);

/// Clears rect, then accumulates settings.spp samples inside it. Pixels outside are untouched.
void render_region(const Scene& scene, const Camera& camera, Framebuffer& fb, const DirtyRect& rect,
                   const RenderSettings& settings, RenderStats* stats = nullptr);

/// Adds settings.spp samples inside rect without clearing.
void accumulate_region(const Scene& scene, const Camera& camera, Framebuffer& fb,
                       const DirtyRect& rect, const RenderSettings& settings,
                       RenderStats* stats = nullptr);

/// Time of prism interval tests alone (BVH + entry/exit, no marching) for one
/// primary ray per pixel.
double measure_interval_ms(const Scene& scene, const Camera& camera, int threads = 0);

/// Conservative pixel rect covering every prism whose uv footprint meets the
/// texel rect, from projected prism boxes. Padded by one pixel and clamped.
DirtyRect dirty_rect_to_pixels(const Scene& scene, const Camera& camera, const DirtyRect& texels);

enum class ImageFormat { kPng, kPfm };

void resolve_and_write(const Framebuffer& fb, const std::filesystem::path& path, ImageFormat format,
                       double exposure = 1.0);

/// Format from the file extension (.png, .pfm).
ImageFormat format_for(const std::filesystem::path& path);

}  // namespace pdm
