// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/service/protocol.h"

#include <boost/beast/core/detail/base64.hpp>
#include <nlohmann/json.hpp>

#include "pdm/error.h"
#include "pdm/image_io.h"

namespace pdm::service {

using nlohmann::json;
namespace b64 = boost::beast::detail::base64;

namespace {

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

BlendMode parse_mode(const std::string& s) {
  if (s == "add") return BlendMode::kAdd;
  if (s == "max") return BlendMode::kMax;
  if (s == "smooth") return BlendMode::kSmooth;
  throw ValidationError("unknown blend mode '" + s + "'");
}

Falloff parse_falloff(const std::string& s) {
  if (s == "smoothstep") return Falloff::kSmoothstep;
  if (s == "linear") return Falloff::kLinear;
  if (s == "hard") return Falloff::kHard;
  throw ValidationError("unknown falloff '" + s + "'");
}

Rgba8 parse_color(const json& j) {
  if (!j.is_array() || (j.size() != 3 && j.size() != 4)) throw ValidationError("color must be [r,g,b(,a)]");
  Rgba8 c{0, 0, 0, 255};
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int v = j[i].get<int>();
    if (v < 0 || v > 255) throw ValidationError("color channels must be in [0, 255]");
    c[i] = static_cast<std::uint8_t>(v);
  }
  return c;
}

}  // namespace

ClientMessage parse_client_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("message: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    if (type == "stroke") {
      StrokeMsg m;
      m.stroke.seq = j.at("seq").get<std::uint64_t>();
      const Vec2 pos(j.at("x").get<double>(), j.at("y").get<double>());
      if (j.value("uv", false)) {
        m.stroke.uv = pos;
      } else {
        m.stroke.pixel = pos;
      }
      m.stroke.brush = j.value("brush", std::string("default"));
      m.stroke.pressure = j.value("pressure", 1.0);
      return m;
    }
    if (type == "camera") {
      CameraMsg m;
      m.reset = j.value("reset", false);
      if (j.contains("position")) m.position = vec3(j["position"]);
      if (j.contains("look_at")) m.look_at = vec3(j["look_at"]);
      if (j.contains("up")) m.up = vec3(j["up"]);
      if (j.contains("fov_deg")) m.fov_deg = j["fov_deg"].get<double>();
      return m;
    }
    if (type == "brush.define") {
      BrushDefineMsg m;
      m.id = j.at("id").get<std::string>();
      m.brush.radius = j.value("radius", m.brush.radius);
      m.brush.strength = j.value("strength", m.brush.strength);
      if (j.contains("mode")) m.brush.mode = parse_mode(j["mode"].get<std::string>());
      if (j.contains("falloff")) m.brush.falloff = parse_falloff(j["falloff"].get<std::string>());
      if (j.contains("color") && !j["color"].is_null()) m.brush.color = parse_color(j["color"]);
      validate_brush(m.brush);
      return m;
    }
    throw ParseError("unknown message type '" + type + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("message: ") + e.what());
  }
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const auto r = b64::decode(out.data(), text.data(), text.size());
  out.resize(r.first);
  return out;
}

std::string tile_message(const Tile& tile) {
  json j{{"type", "tile"},
         {"version", tile.version},
         {"x", tile.rect.x0},
         {"y", tile.rect.y0},
         {"w", tile.rect.width()},
         {"h", tile.rect.height()},
         {"png_base64", base64_encode(encode_png(tile.image))}};
  return j.dump();
}

std::string stats_message(const TickStats& s) {
  json j{{"type", "stats"},     {"edit_ms", s.edit_ms}, {"blas_ms", s.blas_ms},
         {"rt_ms", s.rt_ms},    {"version", s.version}, {"progressive", s.progressive}};
  return j.dump();
}

std::string picked_message(const PickResult& p) {
  json j{{"type", "picked"}, {"u", p.uv.x()}, {"v", p.uv.y()}, {"face", p.face}};
  return j.dump();
}

std::string stroke_ack_message(const StrokeResult& r, std::uint64_t seq) {
  json j{{"type", "stroke.ack"},
         {"seq", seq},
         {"applied", r.applied},
         {"version", r.version},
         {"bounds_exceeded", r.bounds_exceeded},
         {"texels", {r.texels.x0, r.texels.y0, r.texels.width(), r.texels.height()}},
         {"pixels", {r.pixels.x0, r.pixels.y0, r.pixels.width(), r.pixels.height()}}};
  return j.dump();
}

std::string error_message(const std::string& what) { return json{{"type", "error"}, {"message", what}}.dump(); }

std::string hello_message(const Camera& c, std::uint64_t version) {
  json j{{"type", "hello"},
         {"width", c.width},
         {"height", c.height},
         {"version", version},
         {"camera",
          {{"position", {c.position.x(), c.position.y(), c.position.z()}},
           {"look_at", {c.look_at.x(), c.look_at.y(), c.look_at.z()}},
           {"up", {c.up.x(), c.up.y(), c.up.z()}},
           {"fov_deg", c.fov_deg}}}};
  return j.dump();
}

Camera apply_camera_message(const Camera& current, const Camera& initial, const CameraMsg& m) {
  Camera c = m.reset ? initial : current;
  if (m.position) c.position = *m.position;
  if (m.look_at) c.look_at = *m.look_at;
  if (m.up) c.up = *m.up;
  if (m.fov_deg) c.fov_deg = *m.fov_deg;
  c.validate();
  return c;
}

}  // namespace pdm::service
