// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <variant>

#include "pdm/service/session.h"

namespace pdm::service {

struct StrokeMsg {
  StrokeEvent stroke;
};

/// Absolute camera (any subset of fields) or reset to the scene camera.
struct CameraMsg {
  std::optional<Vec3> position, look_at, up;
  std::optional<double> fov_deg;
  bool reset = false;
};

struct BrushDefineMsg {
  std::string id;
  Brush brush;
};

using ClientMessage = std::variant<StrokeMsg, CameraMsg, BrushDefineMsg>;

/// Throws ParseError for malformed JSON or an unknown type, ValidationError for bad fields.
ClientMessage parse_client_message(const std::string& text);

/// Stroke coordinates: "uv": true selects uv space, otherwise x, y are pixels.
std::string tile_message(const Tile& tile);
std::string stats_message(const TickStats& stats);
std::string picked_message(const PickResult& pick);
std::string stroke_ack_message(const StrokeResult& result, std::uint64_t seq);
std::string error_message(const std::string& what);
std::string hello_message(const Camera& camera, std::uint64_t version);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

Camera apply_camera_message(const Camera& current, const Camera& initial, const CameraMsg& msg);

}  // namespace pdm::service
