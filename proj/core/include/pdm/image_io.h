// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pdm/dispmap.h"

namespace pdm {

struct Image16 {
  int width = 0, height = 0;
  std::vector<std::uint16_t> data;  // row-major, top row first
};

struct Image8 {
  int width = 0, height = 0;
  int channels = 4;
  std::vector<std::uint8_t> data;
};

struct ImageF {
  int width = 0, height = 0;
  std::vector<float> data;  // RGB, top row first
};

Image16 read_png_gray16(const std::filesystem::path& path);
void write_png_gray16(const std::filesystem::path& path, const Image16& img);

/// Any 8-bit PNG expanded to RGBA.
Image8 read_png_rgba8(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image8& img);
std::vector<std::uint8_t> encode_png(const Image8& img);
Image8 decode_png(const std::vector<std::uint8_t>& bytes);

/// Little-endian PFM (negative scale header), RGB.
void write_pfm(const std::filesystem::path& path, const ImageF& img);
ImageF read_pfm(const std::filesystem::path& path);

DisplacementMap load_displacement(const std::filesystem::path& path, double world_scale,
                                  double world_bias);
void save_displacement(const std::filesystem::path& path, const DisplacementMap& map);
ColorMap load_color(const std::filesystem::path& path);
void save_color(const std::filesystem::path& path, const ColorMap& map);

}  // namespace pdm
