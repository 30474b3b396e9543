// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdm/bvh.h"
#include "pdm/camera.h"
#include "pdm/dispmap.h"
#include "pdm/march.h"
#include "pdm/mesh.h"
#include "pdm/prism.h"

namespace pdm {

struct Material {
  Vec3 diffuse = Vec3::Constant(0.8);
  double reflectivity = 0.0;
  double refractivity = 0.0;
  double ior = 1.5;
};

struct PointLight {
  Vec3 position = Vec3::Zero();
  Vec3 intensity = Vec3::Ones();  // radiant intensity per channel
};

enum class WmaxPolicy { kGlobal, kPerPrism };

/// Parsed scene JSON. Paths are resolved against base_dir.
struct SceneDescription {
  std::filesystem::path base_dir;
  std::string name;
  std::string mesh;
  std::string displacement;  // empty: constant zero map
  std::string color;         // optional
  double world_scale = 0.0;
  double world_bias = 0.0;
  WmaxPolicy wmax_policy = WmaxPolicy::kGlobal;
  std::optional<double> wmax;  // global value; default 0.05 of the bounding radius
  double w_neg = 0.0;
  bool split_creases = true;
  double crease_threshold_deg = kDefaultCreaseDeg;
  double dt = 0.002;
  Material material;
  std::vector<PointLight> lights;
  Vec3 background = Vec3::Zero();
  Camera camera;
  int spp = 1;
  int path_depth = 2;
  int reflection_depth = 2;
  double exposure = 1.0;
  std::uint64_t seed = 0;

  std::filesystem::path resolve(const std::string& rel) const;
};

/// Throws ParseError on malformed JSON, ValidationError on bad values.
SceneDescription parse_scene(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});
SceneDescription load_scene_description(const std::filesystem::path& path);
std::string scene_to_json(const SceneDescription& desc);

struct GeometryOptions {
  WmaxPolicy policy = WmaxPolicy::kGlobal;
  std::optional<double> wmax;
  double w_neg = 0.0;
  bool split_creases = true;
  double crease_threshold_deg = kDefaultCreaseDeg;
};

/// Immutable geometry: prisms, their boxes and the BVH. Shared by snapshots.
struct Geometry {
  BaseMesh mesh;
  std::vector<Prism> prisms;
  std::vector<Aabb> boxes;
  std::vector<Aabb> uv_boxes;  // per face, uv in x/y
  Bvh bvh;
  double radius = 0.0;
  WmaxPolicy policy = WmaxPolicy::kGlobal;
  CreaseReport crease;
  std::size_t clamped_uv_faces = 0;
};

std::shared_ptr<const Geometry> build_geometry(const BaseMesh& mesh, const DisplacementMap& map,
                                               const GeometryOptions& opts);

/// One immutable render snapshot.
struct Scene {
  std::shared_ptr<const Geometry> geometry;
  std::shared_ptr<const DisplacementMap> map;
  std::shared_ptr<const ColorMap> color;  // may be null
  Material material;
  std::vector<PointLight> lights;
  Vec3 background = Vec3::Zero();
  double dt = 0.002;
  NormalCorrection correction = NormalCorrection::kNormalizeFirst;
  std::uint64_t version = 0;

  bool built() const { return geometry && map && !geometry->prisms.empty(); }
};

Scene build_scene(const SceneDescription& desc);
Scene make_scene(const BaseMesh& mesh, DisplacementMap map, const GeometryOptions& opts,
                 double dt);

struct TraceOptions {
  double jitter = 0.0;
  bool leave_surface = false;
  bool exit_mode = false;
  bool compute_normal = true;
};

/// Closest displaced-surface hit along ray over all prisms.
std::optional<HitRecord> trace(const Scene& scene, const Ray& ray, const TraceOptions& opts = {},
                               MarchStats* stats = nullptr);
/// Reference path: every prism, no BVH.
std::optional<HitRecord> trace_linear(const Scene& scene, const Ray& ray,
                                      const TraceOptions& opts = {});
/// True when any displaced surface lies on the ray within [t_near, t_far].
bool occluded(const Scene& scene, const Ray& ray, double jitter = 0.0, MarchStats* stats = nullptr);

/// Leave distance applied to rays with leave_surface.
double leave_distance(const Scene& scene);

struct BoundsReport {
  bool ok = true;
  double max_height = 0.0;  // world_bias + world_scale
  double min_height = 0.0;  // world_bias
  double min_wmax = 0.0;    // smallest prism height above the base
  std::size_t violating_prisms = 0;
  std::string message;
};

/// Checks that every displacement the map can produce lies inside its prism.
BoundsReport check_bounds(const Scene& scene);

}  // namespace pdm
