// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "cli.h"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <regex>

#include "pdm/error.h"
#include "pdm/oracle/checks.h"
#include "pdm/render.h"
#include "pdm/scene.h"
#include "pdm/service/server.h"

namespace pdm::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  fs::path scene;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dims;
  int threads = 0;
};

struct Dims {
  int w = 0, h = 0;
};

Dims parse_dims(const std::string& s) {
  static const std::regex re(R"((\d+)[xX](\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ValidationError("--dims must look like WxH, got '" + s + "'");
  Dims d{std::stoi(m[1]), std::stoi(m[2])};
  if (d.w < 1 || d.h < 1 || d.w > 16384 || d.h > 16384) throw ValidationError("--dims out of range");
  return d;
}

DirtyRect parse_region(const std::string& s) {
  static const std::regex re(R"((\d+),(\d+),(\d+),(\d+))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw ValidationError("--region must be x0,y0,x1,y1, got '" + s + "'");
  DirtyRect r{std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), std::stoi(m[4])};
  if (r.empty()) throw ValidationError("--region is empty");
  return r;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("scene", c.scene, "Scene JSON")->required();
  sub->add_option("--dt", c.dt, "March step in world units")->check(CLI::PositiveNumber);
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--dims", c.dims, "Image size WxH");
  sub->add_option("--threads", c.threads, "Worker thread cap (0 = all)")->check(CLI::NonNegativeNumber);
}

SceneDescription load_description(const Common& c) {
  SceneDescription d = load_scene_description(c.scene);
  if (c.dt) d.dt = *c.dt;
  if (c.seed) d.seed = *c.seed;
  if (c.dims) {
    const Dims dm = parse_dims(*c.dims);
    d.camera.width = dm.w;
    d.camera.height = dm.h;
  }
  return d;
}

std::string model_name(const SceneDescription& d, const fs::path& path) {
  return d.name.empty() ? path.stem().string() : d.name;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

// render -----------------------------------------------------------------

struct RenderArgs {
  Common common;
  fs::path output = "render.png";
  std::optional<fs::path> pfm;
  std::optional<int> spp;
  std::optional<std::string> region;
  bool primary_only = false;
  std::optional<double> exposure;
};

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  const SceneDescription d = load_description(a.common);
  const Scene scene = build_scene(d);
  const BoundsReport bounds = check_bounds(scene);
  if (!bounds.ok) err << "warning: " << bounds.message << "\n";
  RenderSettings s = settings_from(d);
  s.threads = a.common.threads;
  if (a.spp) s.spp = *a.spp;
  s.primary_only = a.primary_only;
  Framebuffer fb(d.camera.width, d.camera.height);
  RenderStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  if (a.region) {
    render_region(scene, d.camera, fb, parse_region(*a.region).intersect(fb.bounds()), s, &stats);
  } else {
    render_frame(scene, d.camera, fb, s, &stats);
  }
  const double total = ms_since(t0);
  const double isect = measure_interval_ms(scene, d.camera, a.common.threads);
  const double exposure = a.exposure.value_or(d.exposure);
  resolve_and_write(fb, a.output, format_for(a.output), exposure);
  if (a.pfm) resolve_and_write(fb, *a.pfm, ImageFormat::kPfm, exposure);
  const double share = total > 0.0 ? std::min(1.0, isect * s.spp / total) : 0.0;
  out << std::fixed << std::setprecision(3) << "render " << model_name(d, a.common.scene) << " "
      << d.camera.width << "x" << d.camera.height << " spp=" << s.spp << " dt=" << std::defaultfloat
      << d.dt << std::fixed << " seed=" << d.seed << " total_ms=" << total << " isect_ms=" << isect
      << " isect_share=" << share << " primary_rays=" << stats.primary_rays
      << " secondary_rays=" << stats.secondary_rays << " march_samples=" << stats.march_samples
      << " -> " << a.output.string() << "\n";
  return kExitOk;
}

// validate ---------------------------------------------------------------

struct ValidateArgs {
  Common common;
  std::uint64_t rays = 10000;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  const SceneDescription d = load_description(a.common);
  const Scene scene = build_scene(d);
  const auto results = oracle::run_all_checks(scene, a.rays, d.seed);
  bool ok = true;
  out << std::left << std::setw(14) << "check" << std::setw(6) << "result" << std::right
      << std::setw(10) << "tested" << std::setw(10) << "failed" << "  detail\n";
  for (const auto& r : results) {
    const char* status = r.skipped ? "SKIP" : (r.pass ? "PASS" : "FAIL");
    ok = ok && (r.pass || r.skipped);
    out << std::left << std::setw(14) << r.name << std::setw(6) << status << std::right
        << std::setw(10) << r.tested << std::setw(10) << r.failed << "  " << r.detail << "\n";
  }
  out << (ok ? "validate: all checks passed\n" : "validate: FAILED\n");
  return ok ? kExitOk : kExitValidation;
}

// bench ------------------------------------------------------------------

struct BenchArgs {
  Common common;
  std::vector<double> dts;
  int repeat = 3;
  int spp = 1;
  std::vector<std::string> phases{"interval", "primary", "beauty"};
  std::optional<fs::path> csv;
};

int cmd_bench(BenchArgs a, std::ostream& out) {
  if (!a.common.dims) a.common.dims = "512x512";
  const SceneDescription d = load_description(a.common);
  const Scene base = build_scene(d);
  if (a.dts.empty()) a.dts.push_back(d.dt);
  std::ofstream file;
  if (a.csv) {
    file.open(*a.csv);
    if (!file) throw IoError("cannot write " + a.csv->string());
  }
  std::ostream& csv = a.csv ? static_cast<std::ostream&>(file) : out;
  csv << "model,dims,dt,phase,ms,mrays_per_sec\n";
  const std::string dims = std::to_string(d.camera.width) + "x" + std::to_string(d.camera.height);
  const std::string model = model_name(d, a.common.scene);
  const std::uint64_t pixels = static_cast<std::uint64_t>(d.camera.width) * d.camera.height;
  for (double dt : a.dts) {
    Scene scene = base;
    scene.dt = dt;
    for (const std::string& phase : a.phases) {
      double best = std::numeric_limits<double>::infinity();
      std::uint64_t rays = 0;
      for (int r = 0; r < a.repeat; ++r) {
        if (phase == "interval") {
          best = std::min(best, measure_interval_ms(scene, d.camera, a.common.threads));
          rays = pixels;
          continue;
        }
        RenderSettings s = settings_from(d);
        s.threads = a.common.threads;
        if (phase == "primary") {
          s.spp = 1;
          s.primary_only = true;
          s.shadows = false;
        } else {
          s.spp = a.spp;
        }
        Framebuffer fb(d.camera.width, d.camera.height);
        RenderStats stats;
        const auto t0 = std::chrono::steady_clock::now();
        render_frame(scene, d.camera, fb, s, &stats);
        best = std::min(best, ms_since(t0));
        rays = stats.primary_rays + stats.secondary_rays;
      }
      const double mrays = best > 0.0 ? rays / (best * 1000.0) : 0.0;
      char line[256];
      std::snprintf(line, sizeof line, "%s,%s,%g,%s,%.3f,%.4f\n", model.c_str(), dims.c_str(), dt,
                    phase.c_str(), best, mrays);
      csv << line;
    }
  }
  return kExitOk;
}

// serve ------------------------------------------------------------------

struct ServeArgs {
  Common common;
  std::string address = "127.0.0.1";
  unsigned short port = 8080;
  fs::path ui_dir;
  int tick_ms = 15;
  int max_spp = 256;
  int io_threads = 2;
  bool pick_base_mesh = false;
};

int cmd_serve(const ServeArgs& a, std::ostream& out) {
  const SceneDescription d = load_description(a.common);
  Scene scene = build_scene(d);
  service::ServerConfig cfg;
  cfg.address = a.address;
  cfg.port = a.port;
  cfg.ui_dir = a.ui_dir;
  cfg.tick_ms = a.tick_ms;
  cfg.io_threads = a.io_threads;
  cfg.session.max_spp = a.max_spp;
  cfg.session.pick_base_mesh = a.pick_base_mesh;
  cfg.render = settings_from(d);
  cfg.render.threads = a.common.threads;
  service::Server server(std::move(scene), d, cfg);
  const unsigned short port = server.start();
  out << "listening on http://" << a.address << ":" << port << "/" << std::endl;
  server.wait();
  return kExitOk;
}

// trace ------------------------------------------------------------------

struct TraceArgs {
  Common common;
  std::string pixel;
  std::optional<fs::path> output;
};

int cmd_trace(const TraceArgs& a, std::ostream& out) {
  const SceneDescription d = load_description(a.common);
  const Scene scene = build_scene(d);
  static const std::regex re(R"((\d+),(\d+))");
  std::smatch m;
  if (!std::regex_match(a.pixel, m, re)) throw ValidationError("--pixel must be x,y");
  const int px = std::stoi(m[1]);
  const int py = std::stoi(m[2]);
  if (px >= d.camera.width || py >= d.camera.height) throw ValidationError("--pixel outside the image");
  std::ofstream file;
  if (a.output) {
    file.open(*a.output);
    if (!file) throw IoError("cannot write " + a.output->string());
  }
  std::ostream& o = a.output ? static_cast<std::ostream&>(file) : out;

  const Ray ray = d.camera.generate_ray(px, py);
  const auto& prisms = scene.geometry->prisms;
  std::vector<std::pair<IntervalHit, std::uint32_t>> candidates;
  for (std::uint32_t i = 0; i < prisms.size(); ++i)
    if (auto iv = prism_entry_exit(ray, prisms[i])) candidates.push_back({*iv, i});
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& x, const auto& y) { return x.first.t_min < y.first.t_min; });
  MarchOptions mo;
  mo.dt = scene.dt;
  mo.color = scene.color.get();
  for (const auto& [iv, id] : candidates) {
    o << json{{"type", "interval"}, {"prism", id}, {"t_min", iv.t_min}, {"t_max", iv.t_max},
              {"entry", boundary_name(iv.entry_kind)}, {"exit", boundary_name(iv.exit_kind)}}.dump()
      << "\n";
    const MarchObserver obs = [&o, id = id](const MarchState& st) {
      o << json{{"type", "step"}, {"prism", id}, {"step", st.step}, {"t", st.t}, {"h_ray", st.h_ray},
                {"h_surf", st.h_surf}, {"u", st.uv.x()}, {"v", st.uv.y()}, {"in_shell", st.in_shell}}
               .dump()
        << "\n";
    };
    march(ray, prisms[id], iv, *scene.map, mo, nullptr, &obs);
  }
  if (const auto hit = trace(scene, ray)) {
    o << json{{"type", "hit"}, {"prism", hit->prism_id}, {"t", hit->t}, {"u", hit->uv.x()},
              {"v", hit->uv.y()}, {"normal", {hit->normal.x(), hit->normal.y(), hit->normal.z()}}}
             .dump()
      << "\n";
  } else {
    o << json{{"type", "miss"}}.dump() << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Projective displacement mapping renderer"};
  app.name("pdm");
  app.require_subcommand(1);

  RenderArgs ra;
  auto* render = app.add_subcommand("render", "Render an image");
  add_common(render, ra.common);
  render->add_option("-o,--output", ra.output, "Output image (.png or .pfm)");
  render->add_option("--pfm", ra.pfm, "Also write linear PFM");
  render->add_option("--spp", ra.spp, "Samples per pixel")->check(CLI::PositiveNumber);
  render->add_option("--region", ra.region, "Only render x0,y0,x1,y1");
  render->add_flag("--primary-only", ra.primary_only, "Direct light only");
  render->add_option("--exposure", ra.exposure, "Exposure multiplier");

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Run oracle checks on a scene");
  add_common(validate, va.common);
  validate->add_option("--rays", va.rays, "Rays per spray check")->check(CLI::PositiveNumber);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Timing CSV: model,dims,dt,phase,ms,mrays_per_sec");
  add_common(bench, ba.common);
  bench->add_option("--dt-list", ba.dts, "Several dt values")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--repeat", ba.repeat, "Repetitions, best is reported")->check(CLI::Range(1, 1000));
  bench->add_option("--spp", ba.spp, "Beauty samples per pixel")->check(CLI::PositiveNumber);
  bench->add_option("--phases", ba.phases, "interval, primary, beauty")
      ->delimiter(',')
      ->check(CLI::IsMember({"interval", "primary", "beauty"}));
  bench->add_option("--csv", ba.csv, "Write CSV here instead of stdout");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "Run the sculpting service");
  add_common(serve, sa.common);
  serve->add_option("--address", sa.address, "Listen address");
  serve->add_option("--port", sa.port, "Listen port (0 = any)");
  serve->add_option("--ui-dir", sa.ui_dir, "Directory with index.html");
  serve->add_option("--tick-ms", sa.tick_ms, "Render tick period")->check(CLI::Range(1, 10000));
  serve->add_option("--max-spp", sa.max_spp, "Idle sample cap (0 = none)")->check(CLI::NonNegativeNumber);
  serve->add_option("--io-threads", sa.io_threads, "Network threads")->check(CLI::Range(1, 64));
  serve->add_flag("--pick-base-mesh", sa.pick_base_mesh, "Pick against the base mesh");

  TraceArgs ta;
  auto* tr = app.add_subcommand("trace", "Dump the march of one pixel as JSON lines");
  add_common(tr, ta.common);
  tr->add_option("--pixel", ta.pixel, "Pixel x,y")->required();
  tr->add_option("-o,--output", ta.output, "Write JSONL here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*render) return cmd_render(ra, out, err);
    if (*validate) return cmd_validate(va, out);
    if (*bench) return cmd_bench(ba, out);
    if (*serve) return cmd_serve(sa, out);
    if (*tr) return cmd_trace(ta, out);
  } catch (const CreaseError& e) {
    err << "pdm: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "pdm: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pdm::cli
