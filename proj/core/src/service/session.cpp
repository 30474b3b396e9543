// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/service/session.h"

#include <chrono>
#include <limits>

#include "pdm/error.h"
#include "pdm/oracle/tessellation.h"

namespace pdm::service {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

EditSession::EditSession(Scene scene, Camera camera, RenderSettings settings, SessionOptions options)
    : scene_(std::move(scene)), camera_(camera), settings_(settings), options_(options),
      fb_(camera.width, camera.height) {
  if (!scene_.built()) throw ContractError("session: scene is not built");
  camera_.validate();
  if (options_.tile_size < 1) throw ValidationError("tile size must be >= 1");
  settings_.spp = 1;
  version_ = scene_.version;
  Brush standard;
  brushes_.emplace("default", standard);
}

std::optional<PickResult> EditSession::pick_uv(int px, int py) const {
  if (px < 0 || py < 0 || px >= camera_.width || py >= camera_.height) return std::nullopt;
  const Ray ray = camera_.generate_ray(px, py);
  if (options_.pick_base_mesh) {
    const auto h = oracle::base_mesh_hit(scene_.geometry->mesh, ray);
    if (!h) return std::nullopt;
    const BaseMesh& m = scene_.geometry->mesh;
    const Face& f = m.faces[h->face];
    const Vec3 p = ray.at(h->t);
    const Vec3 a = m.vertices[f[0]], b = m.vertices[f[1]], c = m.vertices[f[2]];
    const Vec3 n = (b - a).cross(c - a);
    const double area = n.squaredNorm();
    const double w1 = (p - a).cross(c - a).dot(n) / area;
    const double w2 = (b - a).cross(p - a).dot(n) / area;
    PickResult r;
    r.face = h->face;
    r.b = Bary(1.0 - w1 - w2, w1, w2);
    r.uv = interpolate(r.b, m.uvs[f[0]], m.uvs[f[1]], m.uvs[f[2]]);
    r.t = h->t;
    return r;
  }
  TraceOptions o;
  o.compute_normal = false;
  const auto hit = trace(scene_, ray, o);
  if (!hit) return std::nullopt;
  return PickResult{hit->prism_id, hit->b, hit->uv, hit->t};
}

void EditSession::define_brush(const std::string& id, const Brush& brush) {
  if (id.empty()) throw ValidationError("brush id must not be empty");
  validate_brush(brush);
  brushes_[id] = brush;
}

double EditSession::bound_for(const DirtyRect& texels) const {
  const Geometry& g = *scene_.geometry;
  const DisplacementMap& map = *scene_.map;
  const double u0 = static_cast<double>(texels.x0) / map.width();
  const double u1 = static_cast<double>(texels.x1) / map.width();
  const double v0 = static_cast<double>(texels.y0) / map.height();
  const double v1 = static_cast<double>(texels.y1) / map.height();
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < g.prisms.size(); ++f) {
    const Aabb& uv = g.uv_boxes[f];
    if (uv.max.x() < u0 || uv.min.x() > u1 || uv.max.y() < v0 || uv.min.y() > v1) continue;
    bound = std::min(bound, g.prisms[f].w_max - g.prisms[f].w_neg);
  }
  return bound;
}

StrokeResult EditSession::apply_stroke(const StrokeEvent& stroke) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto it = brushes_.find(stroke.brush);
  if (it == brushes_.end()) throw ValidationError("unknown brush '" + stroke.brush + "'");
  if (any_seq_ && stroke.seq <= last_seq_)
    throw ContractError("stale stroke seq " + std::to_string(stroke.seq) + " (last " +
                        std::to_string(last_seq_) + ")");
  if (!(stroke.pressure >= 0.0 && stroke.pressure <= 1.0))
    throw ValidationError("pressure must be in [0, 1]");
  any_seq_ = true;
  last_seq_ = stroke.seq;

  StrokeResult result;
  Vec2 uv;
  if (stroke.uv) {
    uv = *stroke.uv;
  } else if (stroke.pixel) {
    result.pick = pick_uv(static_cast<int>(stroke.pixel->x()), static_cast<int>(stroke.pixel->y()));
    if (!result.pick) {
      result.version = version_;
      edit_ms_ += ms_since(t0);
      return result;
    }
    uv = result.pick->uv;
  } else {
    throw ValidationError("stroke needs a uv or a pixel position");
  }

  Brush brush = it->second;
  brush.strength *= stroke.pressure;
  auto map = std::make_shared<DisplacementMap>(*scene_.map);
  result.texels = apply_brush(*map, uv, brush);
  if (brush.color && scene_.color) {
    auto color = std::make_shared<ColorMap>(*scene_.color);
    apply_color_brush(*color, uv, brush, static_cast<double>(color->width()) / map->width());
    scene_.color = std::move(color);
  }
  result.bounds_exceeded = !result.texels.empty() && exceeds_bound(*map, result.texels, bound_for(result.texels));
  scene_.map = std::move(map);
  scene_.version = ++version_;
  result.applied = true;
  result.version = version_;
  result.pixels = dirty_rect_to_pixels(scene_, camera_, result.texels);
  dirty_ = dirty_.unite(result.pixels);
  edit_ms_ += ms_since(t0);
  return result;
}

void EditSession::enqueue_stroke(const StrokeEvent& stroke) {
  if (any_seq_ && stroke.seq <= last_seq_)
    throw ContractError("stale stroke seq " + std::to_string(stroke.seq));
  if (!queued_.emplace(stroke.seq, stroke).second)
    throw ContractError("duplicate stroke seq " + std::to_string(stroke.seq));
}

std::vector<StrokeResult> EditSession::flush_strokes() {
  std::vector<StrokeResult> out;
  auto queued = std::move(queued_);
  queued_.clear();
  for (auto& [seq, stroke] : queued) out.push_back(apply_stroke(stroke));
  return out;
}

void EditSession::set_camera(const Camera& camera) {
  camera.validate();
  camera_ = camera;
  fb_ = Framebuffer(camera.width, camera.height);
  dirty_ = {};
  idle_samples_ = 0;
  scene_.version = ++version_;
}

bool EditSession::has_work() const {
  return !queued_.empty() || !dirty_.empty() || options_.max_spp <= 0 || idle_samples_ < options_.max_spp;
}

std::vector<Tile> EditSession::tiles_for(const DirtyRect& rect) const {
  std::vector<Tile> tiles;
  const int ts = options_.tile_size;
  const DirtyRect r = rect.intersect(fb_.bounds());
  if (r.empty()) return tiles;
  for (int ty = r.y0 / ts; ty * ts < r.y1; ++ty)
    for (int tx = r.x0 / ts; tx * ts < r.x1; ++tx) {
      Tile t;
      t.rect = DirtyRect{tx * ts, ty * ts, (tx + 1) * ts, (ty + 1) * ts}.intersect(fb_.bounds());
      t.image = fb_.resolve(t.rect);
      t.version = version_;
      tiles.push_back(std::move(t));
    }
  return tiles;
}

std::vector<Tile> EditSession::frame_tick(TickStats* stats) {
  if (!queued_.empty()) flush_strokes();
  TickStats st;
  st.edit_ms = edit_ms_;
  edit_ms_ = 0.0;
  std::vector<Tile> tiles;
  const auto t0 = std::chrono::steady_clock::now();
  if (!dirty_.empty()) {
    render_region(scene_, camera_, fb_, dirty_, settings_);
    st.rt_ms = ms_since(t0);
    tiles = tiles_for(dirty_);
    dirty_ = {};
  } else if (options_.max_spp <= 0 || idle_samples_ < options_.max_spp) {
    render_frame(scene_, camera_, fb_, settings_);
    ++idle_samples_;
    st.rt_ms = ms_since(t0);
    st.progressive = true;
    tiles = tiles_for(fb_.bounds());
  }
  st.version = version_;
  if (stats) *stats = st;
  return tiles;
}

}  // namespace pdm::service
