// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/scene.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pdm/error.h"
#include "pdm/image_io.h"

namespace pdm {

using nlohmann::json;

namespace {

Vec3 vec3_from(const json& j, const char* what) {
  if (j.is_number()) return Vec3::Constant(j.get<double>());
  if (!j.is_array() || j.size() != 3) throw ValidationError(std::string(what) + " must be a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

WmaxPolicy parse_policy(const std::string& s) {
  if (s == "global") return WmaxPolicy::kGlobal;
  if (s == "per_prism") return WmaxPolicy::kPerPrism;
  throw ValidationError("wmax.policy must be 'global' or 'per_prism'");
}

void validate_description(const SceneDescription& d) {
  if (d.mesh.empty()) throw ValidationError("scene has no mesh");
  if (!(d.dt > 0.0) || !std::isfinite(d.dt)) throw ValidationError("dt must be positive");
  if (!(d.world_scale >= 0.0)) throw ValidationError("world_scale must be non-negative");
  if (d.wmax && !(*d.wmax > 0.0)) throw ValidationError("wmax.value must be positive");
  if (!(d.w_neg >= 0.0)) throw ValidationError("w_neg must be non-negative");
  if (!(d.crease_threshold_deg > 0.0 && d.crease_threshold_deg < 90.0))
    throw ValidationError("crease threshold must be in (0, 90) degrees");
  if (d.spp < 1) throw ValidationError("render.spp must be >= 1");
  if (d.path_depth < 1 || d.reflection_depth < 0) throw ValidationError("bad render depth");
  if (d.material.reflectivity < 0.0 || d.material.refractivity < 0.0 ||
      d.material.reflectivity + d.material.refractivity > 1.0)
    throw ValidationError("reflectivity + refractivity must lie in [0, 1]");
  if (!(d.material.ior > 0.0)) throw ValidationError("ior must be positive");
  d.camera.validate();
}

}  // namespace

std::filesystem::path SceneDescription::resolve(const std::string& rel) const {
  const std::filesystem::path p(rel);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

SceneDescription parse_scene(const std::string& text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene JSON: ") + e.what());
  }
  SceneDescription d;
  d.base_dir = base_dir;
  try {
    if (!j.is_object()) throw ValidationError("scene JSON must be an object");
    read_opt(j, "name", d.name);
    read_opt(j, "mesh", d.mesh);
    if (auto it = j.find("displacement"); it != j.end()) {
      if (it->is_string()) {
        d.displacement = it->get<std::string>();
      } else {
        read_opt(*it, "path", d.displacement);
        read_opt(*it, "world_scale", d.world_scale);
        read_opt(*it, "world_bias", d.world_bias);
      }
    }
    read_opt(j, "color", d.color);
    if (auto it = j.find("wmax"); it != j.end()) {
      if (it->is_number()) {
        d.wmax = it->get<double>();
      } else {
        std::string policy = "global";
        read_opt(*it, "policy", policy);
        d.wmax_policy = parse_policy(policy);
        if (auto v = it->find("value"); v != it->end() && !v->is_null()) d.wmax = v->get<double>();
      }
    }
    read_opt(j, "w_neg", d.w_neg);
    if (auto it = j.find("crease"); it != j.end()) {
      read_opt(*it, "split", d.split_creases);
      read_opt(*it, "threshold_deg", d.crease_threshold_deg);
    }
    read_opt(j, "dt", d.dt);
    if (auto it = j.find("material"); it != j.end()) {
      if (auto c = it->find("diffuse"); c != it->end()) d.material.diffuse = vec3_from(*c, "material.diffuse");
      read_opt(*it, "reflectivity", d.material.reflectivity);
      read_opt(*it, "refractivity", d.material.refractivity);
      read_opt(*it, "ior", d.material.ior);
    }
    if (auto it = j.find("lights"); it != j.end()) {
      for (const json& l : *it) {
        PointLight light;
        light.position = vec3_from(l.at("position"), "light.position");
        if (auto c = l.find("intensity"); c != l.end()) light.intensity = vec3_from(*c, "light.intensity");
        d.lights.push_back(light);
      }
    }
    if (auto it = j.find("background"); it != j.end()) d.background = vec3_from(*it, "background");
    if (auto it = j.find("camera"); it != j.end()) {
      if (auto c = it->find("position"); c != it->end()) d.camera.position = vec3_from(*c, "camera.position");
      if (auto c = it->find("look_at"); c != it->end()) d.camera.look_at = vec3_from(*c, "camera.look_at");
      if (auto c = it->find("up"); c != it->end()) d.camera.up = vec3_from(*c, "camera.up");
      read_opt(*it, "fov_deg", d.camera.fov_deg);
      read_opt(*it, "width", d.camera.width);
      read_opt(*it, "height", d.camera.height);
    }
    if (auto it = j.find("render"); it != j.end()) {
      read_opt(*it, "spp", d.spp);
      read_opt(*it, "path_depth", d.path_depth);
      read_opt(*it, "reflection_depth", d.reflection_depth);
      read_opt(*it, "exposure", d.exposure);
    }
    read_opt(j, "seed", d.seed);
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene JSON: ") + e.what());
  }
  validate_description(d);
  return d;
}

SceneDescription load_scene_description(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path.parent_path());
}

std::string scene_to_json(const SceneDescription& d) {
  json j;
  j["name"] = d.name;
  j["mesh"] = d.mesh;
  j["displacement"] = {{"path", d.displacement}, {"world_scale", d.world_scale}, {"world_bias", d.world_bias}};
  if (!d.color.empty()) j["color"] = d.color;
  j["wmax"] = {{"policy", d.wmax_policy == WmaxPolicy::kGlobal ? "global" : "per_prism"}};
  if (d.wmax) j["wmax"]["value"] = *d.wmax;
  j["w_neg"] = d.w_neg;
  j["crease"] = {{"split", d.split_creases}, {"threshold_deg", d.crease_threshold_deg}};
  j["dt"] = d.dt;
  j["material"] = {{"diffuse", vec3_to(d.material.diffuse)},
                   {"reflectivity", d.material.reflectivity},
                   {"refractivity", d.material.refractivity},
                   {"ior", d.material.ior}};
  j["lights"] = json::array();
  for (const PointLight& l : d.lights)
    j["lights"].push_back({{"position", vec3_to(l.position)}, {"intensity", vec3_to(l.intensity)}});
  j["background"] = vec3_to(d.background);
  j["camera"] = {{"position", vec3_to(d.camera.position)},
                 {"look_at", vec3_to(d.camera.look_at)},
                 {"up", vec3_to(d.camera.up)},
                 {"fov_deg", d.camera.fov_deg},
                 {"width", d.camera.width},
                 {"height", d.camera.height}};
  j["render"] = {{"spp", d.spp},
                 {"path_depth", d.path_depth},
                 {"reflection_depth", d.reflection_depth},
                 {"exposure", d.exposure}};
  j["seed"] = d.seed;
  return j.dump(2);
}

std::shared_ptr<const Geometry> build_geometry(const BaseMesh& input, const DisplacementMap& map,
                                               const GeometryOptions& opts) {
  auto g = std::make_shared<Geometry>();
  g->mesh = opts.split_creases ? split_crease_edges(input, opts.crease_threshold_deg, &g->crease) : input;
  const BaseMesh& mesh = g->mesh;
  if (mesh.faces.empty()) throw ValidationError("mesh has no faces");
  g->radius = bounding_radius(mesh);
  g->policy = opts.policy;
  std::vector<double> wmax(mesh.faces.size());
  if (opts.policy == WmaxPolicy::kPerPrism) {
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      bool clamped = false;
      wmax[f] = per_prism_wmax(mesh, f, map, &clamped);
      g->clamped_uv_faces += clamped;
    }
  } else {
    const double w = opts.wmax ? *opts.wmax : default_global_wmax(mesh);
    std::fill(wmax.begin(), wmax.end(), w);
  }
  g->prisms = build_prisms(mesh, wmax, opts.w_neg);
  g->boxes.reserve(g->prisms.size());
  g->uv_boxes.reserve(g->prisms.size());
  for (const Prism& p : g->prisms) {
    g->boxes.push_back(prism_aabb(p));
    Aabb uv;
    for (const Vec2& t : p.uv) uv.extend(Vec3(t.x(), t.y(), 0.0));
    g->uv_boxes.push_back(uv);
  }
  g->bvh = Bvh::build(g->boxes);
  return g;
}

Scene make_scene(const BaseMesh& mesh, DisplacementMap map, const GeometryOptions& opts, double dt) {
  Scene s;
  s.geometry = build_geometry(mesh, map, opts);
  s.map = std::make_shared<const DisplacementMap>(std::move(map));
  s.dt = dt;
  return s;
}

Scene build_scene(const SceneDescription& d) {
  const BaseMesh mesh = load_mesh_file(d.resolve(d.mesh));
  DisplacementMap map = d.displacement.empty()
                            ? DisplacementMap(1, 1, d.world_scale, d.world_bias)
                            : load_displacement(d.resolve(d.displacement), d.world_scale, d.world_bias);
  GeometryOptions go;
  go.policy = d.wmax_policy;
  go.wmax = d.wmax;
  go.w_neg = d.w_neg;
  go.split_creases = d.split_creases;
  go.crease_threshold_deg = d.crease_threshold_deg;
  Scene s = make_scene(mesh, std::move(map), go, d.dt);
  if (!d.color.empty()) s.color = std::make_shared<const ColorMap>(load_color(d.resolve(d.color)));
  s.material = d.material;
  s.lights = d.lights;
  s.background = d.background;
  return s;
}

double leave_distance(const Scene& scene) { return 2.0 * scene.dt; }

namespace {

MarchOptions march_options(const Scene& scene, const TraceOptions& o) {
  MarchOptions m;
  m.dt = scene.dt;
  m.jitter = o.jitter;
  m.leave_surface = o.leave_surface;
  m.leave_distance = leave_distance(scene);
  m.exit_mode = o.exit_mode;
  m.color = scene.color.get();
  m.correction = scene.correction;
  m.compute_normal = o.compute_normal;
  return m;
}

void require_built(const Scene& scene) {
  if (!scene.built()) throw ContractError("scene is not built");
}

}  // namespace

std::optional<HitRecord> trace(const Scene& scene, const Ray& ray, const TraceOptions& opts,
                               MarchStats* stats) {
  require_built(scene);
  const MarchOptions m = march_options(scene, opts);
  const Geometry& g = *scene.geometry;
  return g.bvh.closest_hit(ray, [&](std::uint32_t id, const Ray& r) {
    return intersect_prism(r, g.prisms[id], *scene.map, m, stats);
  });
}

std::optional<HitRecord> trace_linear(const Scene& scene, const Ray& ray, const TraceOptions& opts) {
  require_built(scene);
  const MarchOptions m = march_options(scene, opts);
  const Geometry& g = *scene.geometry;
  return linear_scan(ray, g.prisms.size(), [&](std::uint32_t id, const Ray& r) {
    return intersect_prism(r, g.prisms[id], *scene.map, m);
  });
}

bool occluded(const Scene& scene, const Ray& ray, double jitter, MarchStats* stats) {
  require_built(scene);
  TraceOptions o;
  o.jitter = jitter;
  o.leave_surface = true;
  o.compute_normal = false;
  const MarchOptions m = march_options(scene, o);
  const Geometry& g = *scene.geometry;
  return g.bvh.any_hit(ray, [&](std::uint32_t id, const Ray& r) {
    return intersect_prism(r, g.prisms[id], *scene.map, m, stats).has_value();
  });
}

BoundsReport check_bounds(const Scene& scene) {
  require_built(scene);
  const Geometry& g = *scene.geometry;
  const DisplacementMap& map = *scene.map;
  BoundsReport r;
  r.max_height = map.max_height();
  r.min_height = map.world_bias();
  r.min_wmax = std::numeric_limits<double>::infinity();
  for (std::size_t f = 0; f < g.prisms.size(); ++f) {
    const Prism& p = g.prisms[f];
    const double top = p.w_max - p.w_neg;
    r.min_wmax = std::min(r.min_wmax, top);
    double need = r.max_height;
    if (g.policy == WmaxPolicy::kPerPrism && top < need)
      need = per_prism_wmax(g.mesh, f, map) / (1.0 + kWmaxPad);
    if (need > top * (1.0 + 1e-12) || r.min_height < -p.w_neg) ++r.violating_prisms;
  }
  r.ok = r.violating_prisms == 0;
  if (!r.ok) {
    std::ostringstream os;
    os << "displacement range [" << r.min_height << ", " << r.max_height << "] exceeds prism bounds on "
       << r.violating_prisms << " prism(s); smallest w_max " << r.min_wmax;
    r.message = os.str();
  }
  return r;
}

}  // namespace pdm
