// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/error.h"

#include <sstream>

namespace pdm {
namespace {

std::string degenerate_message(const std::vector<std::size_t>& faces) {
  std::ostringstream os;
  os << "degenerate face(s):";
  for (std::size_t i = 0; i < faces.size() && i < 16; ++i) os << ' ' << faces[i];
  if (faces.size() > 16) os << " ... (" << faces.size() << " total)";
  return os.str();
}

}  // namespace

DegenerateFaceError::DegenerateFaceError(std::vector<std::size_t> faces)
    : ValidationError(degenerate_message(faces)), faces_(std::move(faces)) {}

CreaseError::CreaseError(std::size_t face, double min_dot)
    : Error("crease singularity at face " + std::to_string(face) +
            " (min N_i.N_g = " + std::to_string(min_dot) + ")"),
      face_(face),
      min_dot_(min_dot) {}

}  // namespace pdm
