// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "pdm/mesh.h"
#include "pdm/scene.h"
#include "pdm/shapes.h"

namespace pdm::test {

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v;
  do {
    v = Vec3(g(rng), g(rng), g(rng));
  } while (v.norm() < 1e-6);
  return v.normalized();
}

inline Bary random_bary(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  double a = u01(rng), b = u01(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return Bary(1.0 - a - b, a, b);
}

/// Single triangle with vertex normals tilted up to max_tilt_deg from the face normal.
inline BaseMesh tilted_triangle(std::mt19937_64& rng, double max_tilt_deg) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  BaseMesh m;
  m.vertices = {Vec3(0.0, 0.0, 0.0), Vec3(1.0, 0.1, 0.0), Vec3(0.2, 0.9, 0.05)};
  const Vec3 ng = (m.vertices[1] - m.vertices[0]).cross(m.vertices[2] - m.vertices[0]).normalized();
  for (int k = 0; k < 3; ++k) {
    Vec3 t = random_unit(rng);
    t = (t - t.dot(ng) * ng).normalized();
    const double a = deg_to_rad(max_tilt_deg * u01(rng));
    m.normals.push_back((std::cos(a) * ng + std::sin(a) * t).normalized());
  }
  m.uvs = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};
  m.faces = {{0, 1, 2}};
  return m;
}

/// Coarse displaced sphere, cheap enough for every test.
inline Scene small_orb(double dt = 0.004) {
  const DisplacementMap map = make_sphere_noise_map(128, 128, 8, 7, 0.1, 0.01, 4);
  GeometryOptions go;
  go.policy = WmaxPolicy::kPerPrism;
  return make_scene(make_uv_sphere(12, 8, 1.0), map, go, dt);
}

inline std::filesystem::path source_dir() { return PDM_SOURCE_DIR; }

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("pdm_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace pdm::test
