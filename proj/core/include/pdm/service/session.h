// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdm/camera.h"
#include "pdm/dispmap.h"
#include "pdm/render.h"
#include "pdm/scene.h"

namespace pdm::service {

struct PickResult {
  std::uint32_t face = 0;
  Bary b = Bary::Zero();
  Vec2 uv = Vec2::Zero();
  double t = 0.0;
};

struct StrokeEvent {
  std::uint64_t seq = 0;
  std::optional<Vec2> uv;     // brush centre in uv
  std::optional<Vec2> pixel;  // or a pixel to pick
  std::string brush = "default";
  double pressure = 1.0;
};

struct StrokeResult {
  bool applied = false;  // false when a pixel pick missed
  std::uint64_t version = 0;
  DirtyRect texels;
  DirtyRect pixels;
  bool bounds_exceeded = false;
  std::optional<PickResult> pick;
};

struct Tile {
  DirtyRect rect;
  Image8 image;
  std::uint64_t version = 0;
};

struct TickStats {
  double edit_ms = 0.0;
  double blas_ms = 0.0;  // no per-edit acceleration structure work
  double rt_ms = 0.0;
  std::uint64_t version = 0;
  bool progressive = false;
};

struct SessionOptions {
  int tile_size = 64;
  int max_spp = 0;  // progressive cap; 0 = unbounded
  bool pick_base_mesh = false;
};

/// One sculpting session. Not thread-safe: a single owner calls every method.
class EditSession {
 public:
  EditSession(Scene scene, Camera camera, RenderSettings settings, SessionOptions options = {});

  std::optional<PickResult> pick_uv(int px, int py) const;

  void define_brush(const std::string& id, const Brush& brush);
  bool has_brush(const std::string& id) const { return brushes_.count(id) > 0; }

  /// Applies a stroke now. Throws ValidationError for an unknown brush and
  /// ContractError when seq does not exceed the last applied seq.
  StrokeResult apply_stroke(const StrokeEvent& stroke);

  /// Buffers a stroke; buffered strokes are applied in seq order by flush_strokes or frame_tick.
  void enqueue_stroke(const StrokeEvent& stroke);
  std::vector<StrokeResult> flush_strokes();

  /// Replaces the camera, clears accumulation and bumps the version.
  void set_camera(const Camera& camera);

  /// Renders pending dirty regions at 1 spp, or one more progressive sample of the
  /// whole frame when idle. Returns the tiles that changed.
  std::vector<Tile> frame_tick(TickStats* stats = nullptr);

  /// True when a tick would render something.
  bool has_work() const;

  const Framebuffer& framebuffer() const { return fb_; }
  const Scene& scene() const { return scene_; }
  const Camera& camera() const { return camera_; }
  std::uint64_t version() const { return version_; }
  std::uint64_t last_seq() const { return last_seq_; }
  DirtyRect pending_dirty() const { return dirty_; }
  int progressive_samples() const { return idle_samples_; }

 private:
  std::vector<Tile> tiles_for(const DirtyRect& rect) const;
  double bound_for(const DirtyRect& texels) const;

  Scene scene_;
  Camera camera_;
  RenderSettings settings_;
  SessionOptions options_;
  Framebuffer fb_;
  std::map<std::string, Brush> brushes_;
  std::map<std::uint64_t, StrokeEvent> queued_;
  std::uint64_t version_ = 0;
  std::uint64_t last_seq_ = 0;
  bool any_seq_ = false;
  DirtyRect dirty_;
  int idle_samples_ = 0;
  double edit_ms_ = 0.0;
};

}  // namespace pdm::service
