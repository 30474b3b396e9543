// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/shapes.h"

#include <cmath>
#include <random>

#include "pdm/error.h"

namespace pdm {

BaseMesh make_uv_sphere(int segments, int rings, double radius, const Vec3& center) {
  if (segments < 3 || rings < 2 || !(radius > 0.0)) throw ValidationError("bad sphere parameters");
  BaseMesh m;
  auto vid = [&](int i, int j) { return static_cast<std::uint32_t>(i * (segments + 1) + j); };
  for (int i = 0; i <= rings; ++i) {
    const double theta = kPi * i / rings;
    for (int j = 0; j <= segments; ++j) {
      const double phi = 2.0 * kPi * j / segments;
      Vec3 n(std::sin(theta) * std::cos(phi), std::cos(theta), -std::sin(theta) * std::sin(phi));
      if (i == 0) n = Vec3::UnitY();
      if (i == rings) n = -Vec3::UnitY();
      m.vertices.push_back(center + radius * n);
      m.normals.push_back(n);
      double u = static_cast<double>(j) / segments;
      if (i == 0 || i == rings) u = (j + 0.5) / segments;
      m.uvs.emplace_back(std::min(u, 1.0), static_cast<double>(i) / rings);
    }
  }
  auto add = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    const Vec3 n = (m.vertices[b] - m.vertices[a]).cross(m.vertices[c] - m.vertices[a]);
    const Vec3 mid = (m.vertices[a] + m.vertices[b] + m.vertices[c]) / 3.0 - center;
    if (n.dot(mid) >= 0.0) {
      m.faces.push_back({a, b, c});
    } else {
      m.faces.push_back({a, c, b});
    }
  };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      if (i == 0) {
        add(vid(0, j), vid(1, j), vid(1, j + 1));
      } else if (i == rings - 1) {
        add(vid(i, j), vid(i + 1, j), vid(i, j + 1));
      } else {
        add(vid(i, j), vid(i + 1, j), vid(i + 1, j + 1));
        add(vid(i, j), vid(i + 1, j + 1), vid(i, j + 1));
      }
    }
  }
  // Drop vertices no face references (the unused pole duplicates).
  std::vector<std::int64_t> remap(m.vertices.size(), -1);
  BaseMesh out;
  for (Face& f : m.faces)
    for (auto& v : f) {
      if (remap[v] < 0) {
        remap[v] = static_cast<std::int64_t>(out.vertices.size());
        out.vertices.push_back(m.vertices[v]);
        out.normals.push_back(m.normals[v]);
        out.uvs.push_back(m.uvs[v]);
      }
      v = static_cast<std::uint32_t>(remap[v]);
    }
  out.faces = std::move(m.faces);
  validate_mesh(out);
  return out;
}

BaseMesh make_grid(int n, double half) {
  if (n < 1 || !(half > 0.0)) throw ValidationError("bad grid parameters");
  BaseMesh m;
  for (int y = 0; y <= n; ++y)
    for (int x = 0; x <= n; ++x) {
      const double u = static_cast<double>(x) / n;
      const double v = static_cast<double>(y) / n;
      m.vertices.emplace_back(-half + 2.0 * half * u, -half + 2.0 * half * v, 0.0);
      m.normals.push_back(Vec3::UnitZ());
      m.uvs.emplace_back(u, v);
    }
  auto id = [&](int x, int y) { return static_cast<std::uint32_t>(y * (n + 1) + x); };
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      m.faces.push_back({id(x, y), id(x + 1, y), id(x + 1, y + 1)});
      m.faces.push_back({id(x, y), id(x + 1, y + 1), id(x, y + 1)});
    }
  validate_mesh(m);
  return m;
}

DisplacementMap make_sphere_noise_map(int width, int height, int rings, std::uint64_t seed,
                                      double world_scale, double world_bias, int octaves) {
  if (width < 2 || height < 2 || rings < 2) throw ValidationError("bad noise map parameters");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  struct Term {
    double amp, fu, phase_u, fv, phase_v;
  };
  std::vector<Term> terms;
  for (int k = 0; k < octaves; ++k)
    terms.push_back({0.5 / (k + 1) * (0.5 + uni(rng)), static_cast<double>(k + 1), 2.0 * kPi * uni(rng),
                     static_cast<double>(k + 1), 2.0 * kPi * uni(rng)});
  const double band = 1.0 / rings + 2.0 / height;
  const double ramp = std::min(0.15, 0.5 - band);
  std::vector<double> vals(static_cast<std::size_t>(width) * height);
  double lo = 1e300, hi = -1e300;
  for (int y = 0; y < height; ++y) {
    const double v = (y + 0.5) / height;
    const double r = static_cast<double>(y) / (height - 1);
    const double edge = std::min(v, 1.0 - v);
    const double window = smoothstep01(std::clamp((edge - band) / ramp, 0.0, 1.0));
    for (int x = 0; x < width; ++x) {
      const double s = static_cast<double>(x) / (width - 1);
      double h = 0.4 * std::cos(2.0 * kPi * r + terms[0].phase_v);
      for (const Term& t : terms)
        h += window * t.amp * std::sin(2.0 * kPi * t.fu * s + t.phase_u) * std::cos(kPi * t.fv * r + t.phase_v);
      vals[static_cast<std::size_t>(y) * width + x] = h;
      lo = std::min(lo, h);
      hi = std::max(hi, h);
    }
  }
  DisplacementMap map(width, height, world_scale, world_bias);
  const double span = hi > lo ? hi - lo : 1.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double n = (vals[static_cast<std::size_t>(y) * width + x] - lo) / span;
      map.set_texel(x, y, static_cast<std::uint16_t>(std::lround(n * 65535.0)));
    }
  return map;
}

}  // namespace pdm
