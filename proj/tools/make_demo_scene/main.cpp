// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

// Writes the orb demo scene: a displaced UV sphere with a height-tinted color map.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pdm/error.h"
#include "pdm/image_io.h"
#include "pdm/scene.h"
#include "pdm/shapes.h"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"Generate the orb demo scene"};
  fs::path out_dir = "scenes/orb";
  int segments = 48;
  int rings = 32;
  int map_size = 256;
  std::uint64_t seed = 7;
  app.add_option("-o,--out", out_dir, "Output directory");
  app.add_option("--segments", segments, "Sphere segments")->check(CLI::Range(3, 4096));
  app.add_option("--rings", rings, "Sphere rings")->check(CLI::Range(2, 4096));
  app.add_option("--map", map_size, "Displacement map size")->check(CLI::Range(8, 8192));
  app.add_option("--seed", seed, "Noise seed");
  CLI11_PARSE(app, argc, argv);

  try {
    fs::create_directories(out_dir);
    const double scale = 0.1;
    const double bias = 0.01;
    const pdm::BaseMesh mesh = pdm::make_uv_sphere(segments, rings, 1.0);
    const pdm::DisplacementMap map = pdm::make_sphere_noise_map(map_size, map_size, rings, seed, scale, bias, 10);
    {
      std::ofstream obj(out_dir / "orb.obj");
      if (!obj) throw pdm::IoError("cannot write " + (out_dir / "orb.obj").string());
      pdm::write_obj(obj, mesh);
    }
    pdm::save_displacement(out_dir / "orb_height.png", map);

    pdm::ColorMap color(map_size, map_size);
    const pdm::Vec3 low(0.72, 0.42, 0.22);
    const pdm::Vec3 high(0.93, 0.86, 0.70);
    for (int y = 0; y < map_size; ++y) {
      for (int x = 0; x < map_size; ++x) {
        const double h = map.texel(x, y) / 65535.0;
        const pdm::Vec3 c = low + (high - low) * std::pow(h, 0.8);
        color.set_texel(x, y, {static_cast<std::uint8_t>(std::lround(255 * c.x())),
                               static_cast<std::uint8_t>(std::lround(255 * c.y())),
                               static_cast<std::uint8_t>(std::lround(255 * c.z())), 255});
      }
    }
    pdm::save_color(out_dir / "orb_color.png", color);

    pdm::SceneDescription d;
    d.name = "orb";
    d.mesh = "orb.obj";
    d.displacement = "orb_height.png";
    d.color = "orb_color.png";
    d.world_scale = scale;
    d.world_bias = bias;
    d.wmax_policy = pdm::WmaxPolicy::kPerPrism;
    d.dt = 0.002;
    d.material.diffuse = pdm::Vec3(0.8, 0.8, 0.8);
    d.lights.push_back({pdm::Vec3(4.0, 5.0, 6.0), pdm::Vec3(60.0, 58.0, 54.0)});
    d.lights.push_back({pdm::Vec3(-5.0, 1.0, 2.0), pdm::Vec3(8.0, 9.0, 12.0)});
    d.background = pdm::Vec3(0.05, 0.06, 0.08);
    d.camera.position = pdm::Vec3(0.0, 0.6, 3.4);
    d.camera.look_at = pdm::Vec3::Zero();
    d.camera.fov_deg = 40.0;
    d.camera.width = 512;
    d.camera.height = 512;
    d.spp = 16;
    d.seed = 1;
    std::ofstream js(out_dir / "orb.json");
    js << pdm::scene_to_json(d) << "\n";
    if (!js) throw pdm::IoError("cannot write " + (out_dir / "orb.json").string());
    std::cout << "wrote " << (out_dir / "orb.json").string() << " (" << mesh.faces.size() << " faces)\n";
  } catch (const std::exception& e) {
    std::cerr << "make_demo_scene: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
