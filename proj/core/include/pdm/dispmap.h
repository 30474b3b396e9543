// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "pdm/math.h"

namespace pdm {

/// Half-open texel or pixel rectangle [x0, x1) x [y0, y1).
struct DirtyRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

  bool empty() const { return x1 <= x0 || y1 <= y0; }
  int width() const { return std::max(0, x1 - x0); }
  int height() const { return std::max(0, y1 - y0); }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool contains(int x, int y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  DirtyRect intersect(const DirtyRect& o) const {
    return {std::max(x0, o.x0), std::max(y0, o.y0), std::min(x1, o.x1), std::min(y1, o.y1)};
  }
  DirtyRect unite(const DirtyRect& o) const {
    if (empty()) return o;
    if (o.empty()) return *this;
    return {std::min(x0, o.x0), std::min(y0, o.y0), std::max(x1, o.x1), std::max(y1, o.y1)};
  }
  bool operator==(const DirtyRect&) const = default;
};

/// 2D image stored as 64x64 tiles behind shared pointers. Copies share tiles;
/// writes clone a tile only while it is shared.
template <typename T>
class TiledImage {
 public:
  static constexpr int kTileShift = 6;
  static constexpr int kTile = 1 << kTileShift;

  TiledImage() = default;
  TiledImage(int width, int height, T fill = T{})
      : width_(width), height_(height), tiles_x_((width + kTile - 1) >> kTileShift),
        tiles_y_((height + kTile - 1) >> kTileShift) {
    auto proto = std::make_shared<Tile>();
    proto->fill(fill);
    tiles_.assign(static_cast<std::size_t>(tiles_x_) * tiles_y_, proto);
  }

  int width() const { return width_; }
  int height() const { return height_; }

  const T& at(int x, int y) const {
    const Tile& t = *tiles_[(y >> kTileShift) * tiles_x_ + (x >> kTileShift)];
    return t[((y & (kTile - 1)) << kTileShift) | (x & (kTile - 1))];
  }

  T& mutable_at(int x, int y) {
    auto& slot = tiles_[(y >> kTileShift) * tiles_x_ + (x >> kTileShift)];
    if (slot.use_count() > 1) slot = std::make_shared<Tile>(*slot);
    return (*slot)[((y & (kTile - 1)) << kTileShift) | (x & (kTile - 1))];
  }

  void set(int x, int y, const T& v) { mutable_at(x, y) = v; }

  /// Tiles shared with another image (diagnostics for copy-on-write).
  std::size_t shared_tiles(const TiledImage& other) const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < tiles_.size() && i < other.tiles_.size(); ++i)
      n += tiles_[i] == other.tiles_[i];
    return n;
  }

 private:
  using Tile = std::array<T, kTile * kTile>;
  int width_ = 0, height_ = 0, tiles_x_ = 0, tiles_y_ = 0;
  std::vector<std::shared_ptr<Tile>> tiles_;
};

/// 16-bit normalized height field. Sampled height = world_bias + value * world_scale.
/// Texel (x, y) is centred at uv ((x + 0.5) / W, (y + 0.5) / H); row 0 is v = 0.
class DisplacementMap {
 public:
  DisplacementMap() = default;
  DisplacementMap(int width, int height, double world_scale, double world_bias,
                  std::uint16_t fill = 0);

  int width() const { return texels_.width(); }
  int height() const { return texels_.height(); }
  double world_scale() const { return world_scale_; }
  double world_bias() const { return world_bias_; }
  void set_world_mapping(double scale, double bias) {
    world_scale_ = scale;
    world_bias_ = bias;
  }

  std::uint16_t texel(int x, int y) const {
    return texels_.at(std::clamp(x, 0, width() - 1), std::clamp(y, 0, height() - 1));
  }
  double normalized(int x, int y) const { return texel(x, y) * (1.0 / 65535.0); }
  void set_texel(int x, int y, std::uint16_t v) { texels_.set(x, y, v); }

  /// Bilinear, clamp addressing, normalized [0,1].
  double sample_normalized(const Vec2& uv) const;
  double sample(const Vec2& uv) const { return world_bias_ + world_scale_ * sample_normalized(uv); }
  double max_height() const { return world_bias_ + world_scale_; }

  const TiledImage<std::uint16_t>& texels() const { return texels_; }

 private:
  TiledImage<std::uint16_t> texels_;
  double world_scale_ = 0.0;
  double world_bias_ = 0.0;
};

using Rgba8 = std::array<std::uint8_t, 4>;

/// RGBA8 companion map; alpha 0 marks cut-outs.
class ColorMap {
 public:
  ColorMap() = default;
  ColorMap(int width, int height, Rgba8 fill = {255, 255, 255, 255}) : texels_(width, height, fill) {}

  int width() const { return texels_.width(); }
  int height() const { return texels_.height(); }
  bool valid() const { return width() > 0 && height() > 0; }
  Rgba8 texel(int x, int y) const {
    return texels_.at(std::clamp(x, 0, width() - 1), std::clamp(y, 0, height() - 1));
  }
  void set_texel(int x, int y, Rgba8 v) { texels_.set(x, y, v); }

  /// Bilinear RGBA in [0,1].
  Eigen::Vector4d sample(const Vec2& uv) const;

 private:
  TiledImage<Rgba8> texels_;
};

enum class Falloff { kSmoothstep, kLinear, kHard };
enum class BlendMode { kAdd, kMax, kSmooth };

struct Brush {
  double radius = 8.0;    // texels
  double strength = 0.5;  // [-1, 1]
  Falloff falloff = Falloff::kSmoothstep;
  BlendMode mode = BlendMode::kAdd;
  std::optional<Rgba8> color;
};

void validate_brush(const Brush& brush);
double brush_weight(const Brush& brush, double r);

double sample_bilinear(const DisplacementMap& map, const Vec2& uv);

/// Applies the brush centred at uv. Returns the texel bounding square of the
/// brush footprint clipped to the map, whether or not any texel changed.
DirtyRect apply_brush(DisplacementMap& map, const Vec2& center_uv, const Brush& brush);

/// Paints brush.color (if any) into the colour map. Radius is in displacement
/// texels and scaled by radius_scale. Returns the colour-map texel rect.
DirtyRect apply_color_brush(ColorMap& map, const Vec2& center_uv, const Brush& brush,
                            double radius_scale = 1.0);

/// Maximum normalized texel value over rect (clipped to the map).
double region_max(const DisplacementMap& map, const DirtyRect& rect);

/// region_max * scale + bias > bound.
bool exceeds_bound(const DisplacementMap& map, const DirtyRect& rect, double bound);

}  // namespace pdm
