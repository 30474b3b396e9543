// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/image_io.h"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "pdm/error.h"

namespace pdm {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) { throw IoError(std::string("png: ") + msg); }
void png_warning_fn(png_structp, png_const_charp) {}

struct ReadState {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t pos;
};

void png_read_mem(png_structp png, png_bytep out, png_size_t n) {
  auto* st = static_cast<ReadState*>(png_get_io_ptr(png));
  if (st->pos + n > st->size) png_error(png, "truncated buffer");
  std::memcpy(out, st->data + st->pos, n);
  st->pos += n;
}

void png_write_mem(png_structp png, png_bytep in, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + n);
}
void png_flush_mem(png_structp) {}

// Decodes into 8-bit RGBA or 16-bit gray depending on want16.
template <typename Setup>
void decode(Setup&& setup_io, bool want16, int& w, int& h, std::vector<std::uint8_t>& rgba,
            std::vector<std::uint16_t>& gray) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png: cannot create read struct");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_read_struct(p, i, nullptr); }
  } guard{&png, &info};
  setup_io(png);
  png_read_info(png, info);
  w = static_cast<int>(png_get_image_width(png, info));
  h = static_cast<int>(png_get_image_height(png, info));
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (want16) {
    if (color != PNG_COLOR_TYPE_GRAY) throw IoError("displacement PNG must be single-channel gray");
    if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (depth <= 8) {
      // 8-bit input widened to 16 bits.
    }
#if defined(__BYTE_ORDER__) && __BYTE_ORDER__ == __ORDER_LITTLE_ENDIAN__
    if (depth == 16) png_set_swap(png);
#endif
    png_read_update_info(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    std::vector<std::uint8_t> buf(rowbytes * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = buf.data() + y * rowbytes;
    png_read_image(png, rows.data());
    gray.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (depth == 16) {
          std::uint16_t v;
          std::memcpy(&v, rows[y] + 2 * x, 2);
          gray[static_cast<std::size_t>(y) * w + x] = v;
        } else {
          gray[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint16_t>(rows[y][x] * 257);
        }
      }
    }
  } else {
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (!(color & PNG_COLOR_MASK_ALPHA) && !png_get_valid(png, info, PNG_INFO_tRNS))
      png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
    png_read_update_info(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    if (rowbytes != static_cast<std::size_t>(w) * 4) throw IoError("png: unexpected row layout");
    rgba.resize(rowbytes * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = rgba.data() + y * rowbytes;
    png_read_image(png, rows.data());
  }
  png_read_end(png, nullptr);
}

template <typename Setup>
void encode(Setup&& setup_io, int w, int h, int color_type, int depth, const std::uint8_t* data,
            std::size_t rowbytes, bool swap16) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
  if (!png) throw IoError("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  struct Guard {
    png_structp* p;
    png_infop* i;
    ~Guard() { png_destroy_write_struct(p, i); }
  } guard{&png, &info};
  setup_io(png);
  png_set_IHDR(png, info, w, h, depth, color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  if (swap16) png_set_swap(png);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = const_cast<std::uint8_t*>(data + y * rowbytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
}

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw IoError("cannot open " + path.string());
  return f;
}

int png_color_type(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw IoError("png: unsupported channel count");
  }
}

bool little_endian() {
  const std::uint16_t one = 1;
  std::uint8_t b;
  std::memcpy(&b, &one, 1);
  return b == 1;
}

}  // namespace

Image16 read_png_gray16(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  Image16 img;
  std::vector<std::uint8_t> unused;
  decode([&](png_structp png) { png_init_io(png, f.get()); }, true, img.width, img.height, unused, img.data);
  return img;
}

void write_png_gray16(const std::filesystem::path& path, const Image16& img) {
  FilePtr f = open_file(path, "wb");
  encode([&](png_structp png) { png_init_io(png, f.get()); }, img.width, img.height,
         PNG_COLOR_TYPE_GRAY, 16, reinterpret_cast<const std::uint8_t*>(img.data.data()),
         static_cast<std::size_t>(img.width) * 2, little_endian());
}

Image8 read_png_rgba8(const std::filesystem::path& path) {
  FilePtr f = open_file(path, "rb");
  Image8 img;
  std::vector<std::uint16_t> unused;
  decode([&](png_structp png) { png_init_io(png, f.get()); }, false, img.width, img.height, img.data, unused);
  img.channels = 4;
  return img;
}

void write_png(const std::filesystem::path& path, const Image8& img) {
  FilePtr f = open_file(path, "wb");
  encode([&](png_structp png) { png_init_io(png, f.get()); }, img.width, img.height,
         png_color_type(img.channels), 8, img.data.data(),
         static_cast<std::size_t>(img.width) * img.channels, false);
}

std::vector<std::uint8_t> encode_png(const Image8& img) {
  std::vector<std::uint8_t> out;
  encode([&](png_structp png) { png_set_write_fn(png, &out, png_write_mem, png_flush_mem); },
         img.width, img.height, png_color_type(img.channels), 8, img.data.data(),
         static_cast<std::size_t>(img.width) * img.channels, false);
  return out;
}

Image8 decode_png(const std::vector<std::uint8_t>& bytes) {
  ReadState st{bytes.data(), bytes.size(), 0};
  Image8 img;
  std::vector<std::uint16_t> unused;
  decode([&](png_structp png) { png_set_read_fn(png, &st, png_read_mem); }, false, img.width,
         img.height, img.data, unused);
  img.channels = 4;
  return img;
}

void write_pfm(const std::filesystem::path& path, const ImageF& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << "PF\n" << img.width << ' ' << img.height << "\n-1.0\n";
  // PFM stores the bottom row first.
  for (int y = img.height - 1; y >= 0; --y) {
    const float* row = img.data.data() + static_cast<std::size_t>(y) * img.width * 3;
    if (little_endian()) {
      out.write(reinterpret_cast<const char*>(row), static_cast<std::streamsize>(img.width) * 3 * 4);
    } else {
      for (int i = 0; i < img.width * 3; ++i) {
        std::uint32_t u;
        std::memcpy(&u, row + i, 4);
        u = __builtin_bswap32(u);
        out.write(reinterpret_cast<const char*>(&u), 4);
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ImageF read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  ImageF img;
  double scale = 0.0;
  in >> magic >> img.width >> img.height >> scale;
  in.get();
  if (magic != "PF" || img.width <= 0 || img.height <= 0 || scale == 0.0)
    throw IoError("not an RGB PFM: " + path.string());
  const bool file_le = scale < 0.0;
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * 3);
  for (int y = img.height - 1; y >= 0; --y) {
    float* row = img.data.data() + static_cast<std::size_t>(y) * img.width * 3;
    in.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(img.width) * 3 * 4);
    if (file_le != little_endian()) {
      for (int i = 0; i < img.width * 3; ++i) {
        std::uint32_t u;
        std::memcpy(&u, row + i, 4);
        u = __builtin_bswap32(u);
        std::memcpy(row + i, &u, 4);
      }
    }
  }
  if (!in) throw IoError("truncated PFM: " + path.string());
  return img;
}

DisplacementMap load_displacement(const std::filesystem::path& path, double world_scale,
                                  double world_bias) {
  const Image16 img = read_png_gray16(path);
  DisplacementMap map(img.width, img.height, world_scale, world_bias);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const std::uint16_t v = img.data[static_cast<std::size_t>(y) * img.width + x];
      if (v) map.set_texel(x, y, v);
    }
  return map;
}

void save_displacement(const std::filesystem::path& path, const DisplacementMap& map) {
  Image16 img;
  img.width = map.width();
  img.height = map.height();
  img.data.resize(static_cast<std::size_t>(img.width) * img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) img.data[static_cast<std::size_t>(y) * img.width + x] = map.texel(x, y);
  write_png_gray16(path, img);
}

ColorMap load_color(const std::filesystem::path& path) {
  const Image8 img = read_png_rgba8(path);
  ColorMap map(img.width, img.height);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const std::uint8_t* p = img.data.data() + (static_cast<std::size_t>(y) * img.width + x) * 4;
      map.set_texel(x, y, {p[0], p[1], p[2], p[3]});
    }
  return map;
}

void save_color(const std::filesystem::path& path, const ColorMap& map) {
  Image8 img;
  img.width = map.width();
  img.height = map.height();
  img.channels = 4;
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * 4);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      const Rgba8 c = map.texel(x, y);
      std::memcpy(img.data.data() + (static_cast<std::size_t>(y) * img.width + x) * 4, c.data(), 4);
    }
  write_png(path, img);
}

}  // namespace pdm
