// Copyright 2026 The pdm Authors.
// SPDX-License-Identifier: Apache-2.0

#include "pdm/render.h"

#include <tbb/blocked_range2d.h>
#include <tbb/global_control.h>
#include <tbb/parallel_for.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>

#include "pdm/error.h"

namespace pdm {

Pcg32::Pcg32(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1u) | 1u) {
  next_u32();
  state_ += seed;
  next_u32();
}

std::uint32_t Pcg32::next_u32() {
  const std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  const auto rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

double Pcg32::next_double() { return next_u32() * (1.0 / 4294967296.0); }

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t sample_seed(std::uint32_t pixel, std::uint32_t sample, std::uint64_t seed) {
  return splitmix(splitmix(seed) ^ (static_cast<std::uint64_t>(pixel) << 32 | sample));
}

Framebuffer::Framebuffer(int width, int height)
    : width_(width), height_(height),
      accum_(static_cast<std::size_t>(width) * height * 3, 0.0f),
      counts_(static_cast<std::size_t>(width) * height, 0u) {
  if (width < 1 || height < 1) throw ValidationError("framebuffer dimensions must be >= 1");
}

void Framebuffer::clear() {
  std::fill(accum_.begin(), accum_.end(), 0.0f);
  std::fill(counts_.begin(), counts_.end(), 0u);
}

void Framebuffer::reset(const DirtyRect& rect) {
  const DirtyRect r = rect.intersect(bounds());
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) {
      const std::size_t i = index(x, y);
      accum_[3 * i] = accum_[3 * i + 1] = accum_[3 * i + 2] = 0.0f;
      counts_[i] = 0;
    }
}

void Framebuffer::add(int x, int y, const Vec3& rgb) {
  const std::size_t i = index(x, y);
  accum_[3 * i] += static_cast<float>(rgb.x());
  accum_[3 * i + 1] += static_cast<float>(rgb.y());
  accum_[3 * i + 2] += static_cast<float>(rgb.z());
  ++counts_[i];
}

Eigen::Vector3f Framebuffer::accum(int x, int y) const {
  const std::size_t i = index(x, y);
  return {accum_[3 * i], accum_[3 * i + 1], accum_[3 * i + 2]};
}

Vec3 Framebuffer::mean(int x, int y) const {
  const std::uint32_t n = count(x, y);
  if (n == 0) return Vec3::Zero();
  return accum(x, y).cast<double>() / n;
}

ImageF Framebuffer::linear() const {
  ImageF img;
  img.width = width_;
  img.height = height_;
  img.data.resize(accum_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const float inv = counts_[i] ? 1.0f / static_cast<float>(counts_[i]) : 0.0f;
    for (int c = 0; c < 3; ++c) img.data[3 * i + c] = accum_[3 * i + c] * inv;
  }
  return img;
}

double srgb_encode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

std::uint8_t srgb_to_u8(double linear) {
  return static_cast<std::uint8_t>(std::lround(srgb_encode(linear) * 255.0));
}

Image8 Framebuffer::resolve(double exposure) const { return resolve(bounds(), exposure); }

Image8 Framebuffer::resolve(const DirtyRect& rect, double exposure) const {
  const DirtyRect r = rect.intersect(bounds());
  Image8 img;
  img.width = r.width();
  img.height = r.height();
  img.channels = 4;
  img.data.resize(static_cast<std::size_t>(img.width) * img.height * 4);
  std::size_t o = 0;
  for (int y = r.y0; y < r.y1; ++y)
    for (int x = r.x0; x < r.x1; ++x) {
      const Vec3 m = mean(x, y) * exposure;
      img.data[o++] = srgb_to_u8(m.x());
      img.data[o++] = srgb_to_u8(m.y());
      img.data[o++] = srgb_to_u8(m.z());
      img.data[o++] = 255;
    }
  return img;
}

RenderSettings settings_from(const SceneDescription& d) {
  RenderSettings s;
  s.spp = d.spp;
  s.seed = d.seed;
  s.path_depth = d.path_depth;
  s.reflection_depth = d.reflection_depth;
  return s;
}

namespace {

struct Context {
  const Scene& scene;
  const RenderSettings& settings;
  Pcg32& rng;
  RenderStats* stats;
  MarchStats march;
  double eps;
};

Vec3 cosine_direction(const Vec3& n, Pcg32& rng) {
  const double u1 = rng.next_double();
  const double u2 = rng.next_double();
  const double r = std::sqrt(u1);
  const double phi = 2.0 * kPi * u2;
  const Vec3 t = n.unitOrthogonal();
  const Vec3 b = n.cross(t);
  return (r * std::cos(phi) * t + r * std::sin(phi) * b + std::sqrt(std::max(0.0, 1.0 - u1)) * n)
      .normalized();
}

std::optional<Vec3> refract(const Vec3& d, const Vec3& n, double eta) {
  const double cosi = -n.dot(d);
  const double k = 1.0 - eta * eta * (1.0 - cosi * cosi);
  if (k < 0.0) return std::nullopt;
  return (eta * d + (eta * cosi - std::sqrt(k)) * n).normalized();
}

Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0 * d.dot(n) * n; }

double march_jitter(Context& ctx) { return ctx.settings.jitter_march ? ctx.rng.next_double() : 0.0; }

Vec3 radiance(Context& ctx, const Ray& ray, int path_left, int refl_left, bool primary) {
  const Scene& scene = ctx.scene;
  TraceOptions to;
  to.jitter = march_jitter(ctx);
  to.leave_surface = !primary;
  if (ctx.stats) ++(primary ? ctx.stats->primary_rays : ctx.stats->secondary_rays);
  const auto hit = trace(scene, ray, to, &ctx.march);
  if (!hit) return scene.background;

  Vec3 n = hit->normal;
  if (n.dot(ray.dir) > 0.0) n = -n;
  const Vec3& p = hit->point;
  Vec3 albedo = scene.material.diffuse;
  if (scene.color) albedo = albedo.cwiseProduct(scene.color->sample(hit->uv).head<3>());
  const Material& mat = scene.material;
  const double w_diffuse = 1.0 - mat.reflectivity - mat.refractivity;
  const bool secondary = !ctx.settings.primary_only;

  Vec3 l_out = Vec3::Zero();
  if (w_diffuse > 0.0) {
    Vec3 direct = Vec3::Zero();
    for (const PointLight& light : scene.lights) {
      const Vec3 to_light = light.position - p;
      const double d = to_light.norm();
      if (!(d > 0.0)) continue;
      const Vec3 l = to_light / d;
      const double c = n.dot(l);
      if (c <= 0.0) continue;
      if (ctx.settings.shadows) {
        const double j = march_jitter(ctx);
        if (ctx.stats) ++ctx.stats->secondary_rays;
        if (occluded(scene, make_ray(p, l, ctx.eps, d), j, &ctx.march)) continue;
      }
      direct += light.intensity * (c / (kPi * d * d));
    }
    Vec3 indirect = Vec3::Zero();
    if (secondary && path_left > 1) {
      const Vec3 dir = cosine_direction(n, ctx.rng);
      indirect = radiance(ctx, make_ray(p, dir, ctx.eps), path_left - 1, refl_left, false);
    }
    l_out += w_diffuse * albedo.cwiseProduct(direct + indirect);
  }
  if (secondary && refl_left > 0 && mat.reflectivity > 0.0) {
    const Ray r = make_ray(p, reflect(ray.dir, n), ctx.eps);
    l_out += mat.reflectivity * radiance(ctx, r, path_left, refl_left - 1, false);
  }
  if (secondary && refl_left > 0 && mat.refractivity > 0.0) {
    const bool entering = hit->normal.dot(ray.dir) < 0.0;
    const double eta = entering ? 1.0 / mat.ior : mat.ior;
    const auto inside_dir = refract(ray.dir, n, eta);
    if (inside_dir && entering) {
      TraceOptions xo;
      xo.jitter = march_jitter(ctx);
      xo.leave_surface = true;
      xo.exit_mode = true;
      if (ctx.stats) ++ctx.stats->secondary_rays;
      const auto exit_hit = trace(scene, make_ray(p, *inside_dir, ctx.eps), xo, &ctx.march);
      if (exit_hit) {
        Vec3 n2 = exit_hit->normal;
        if (n2.dot(*inside_dir) > 0.0) n2 = -n2;
        if (const auto out = refract(*inside_dir, n2, mat.ior)) {
          const Ray r = make_ray(exit_hit->point, *out, ctx.eps);
          l_out += mat.refractivity * radiance(ctx, r, path_left, refl_left - 1, false);
        }
      } else {
        l_out += mat.refractivity * scene.background;
      }
    } else if (inside_dir) {
      const Ray r = make_ray(p, *inside_dir, ctx.eps);
      l_out += mat.refractivity * radiance(ctx, r, path_left, refl_left - 1, false);
    }
  }
  return l_out;
}

void merge(RenderStats* into, const RenderStats& from, const MarchStats& ms) {
  if (!into) return;
  into->primary_rays += from.primary_rays;
  into->secondary_rays += from.secondary_rays;
  into->march_samples += ms.samples;
  into->marches += ms.marches;
}

template <typename Fn>
void for_each_tile(const DirtyRect& r, int threads, Fn&& fn) {
  if (r.empty()) return;
  std::unique_ptr<tbb::global_control> limit;
  if (threads > 0)
    limit = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                  static_cast<std::size_t>(threads));
  constexpr int kT = RenderSettings::kTile;
  const int tx = (r.width() + kT - 1) / kT;
  const int ty = (r.height() + kT - 1) / kT;
  tbb::parallel_for(tbb::blocked_range2d<int>(0, ty, 1, 0, tx, 1),
                    [&](const tbb::blocked_range2d<int>& br) {
                      for (int j = br.rows().begin(); j < br.rows().end(); ++j)
                        for (int i = br.cols().begin(); i < br.cols().end(); ++i) {
                          const DirtyRect tile{r.x0 + i * kT, r.y0 + j * kT,
                                               std::min(r.x1, r.x0 + (i + 1) * kT),
                                               std::min(r.y1, r.y0 + (j + 1) * kT)};
                          fn(tile);
                        }
                    });
}

double scene_eps(const Scene& scene) { return 1e-7 * (1.0 + scene.geometry->radius); }

void check_inputs(const Scene& scene, const Camera& camera, const Framebuffer& fb) {
  if (!scene.built()) throw ContractError("render: scene is not built");
  camera.validate();
  if (fb.width() != camera.width || fb.height() != camera.height)
    throw ContractError("render: framebuffer size differs from camera");
}

}  // namespace

Vec3 render_sample(const Scene& scene, const Camera& camera, int x, int y, std::uint32_t sample,
                   const RenderSettings& settings, RenderStats* stats) {
  const auto pixel = static_cast<std::uint32_t>(y * camera.width + x);
  Pcg32 rng(sample_seed(pixel, sample, settings.seed));
  const double sx = settings.jitter_pixels ? rng.next_double() : 0.5;
  const double sy = settings.jitter_pixels ? rng.next_double() : 0.5;
  Context ctx{scene, settings, rng, stats, {}, scene_eps(scene)};
  const Vec3 l = radiance(ctx, camera.generate_ray(x, y, sx, sy), settings.path_depth,
                          settings.reflection_depth, true);
  if (stats) {
    stats->march_samples += ctx.march.samples;
    stats->marches += ctx.march.marches;
  }
  return l;
}

void accumulate_region(const Scene& scene, const Camera& camera, Framebuffer& fb,
                       const DirtyRect& rect, const RenderSettings& settings, RenderStats* stats) {
  check_inputs(scene, camera, fb);
  if (settings.spp < 1) throw ValidationError("spp must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  std::mutex mu;
  for_each_tile(rect.intersect(fb.bounds()), settings.threads, [&](const DirtyRect& tile) {
    RenderStats local;
    MarchStats ms;
    for (int y = tile.y0; y < tile.y1; ++y)
      for (int x = tile.x0; x < tile.x1; ++x)
        for (int s = 0; s < settings.spp; ++s) {
          RenderStats one;
          const Vec3 l = render_sample(scene, camera, x, y, fb.count(x, y), settings,
                                       stats ? &one : nullptr);
          fb.add(x, y, l);
          local.primary_rays += one.primary_rays;
          local.secondary_rays += one.secondary_rays;
          ms.samples += one.march_samples;
          ms.marches += one.marches;
        }
    if (stats) {
      std::lock_guard lock(mu);
      merge(stats, local, ms);
    }
  });
  if (stats)
    stats->total_ms +=
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

void render_frame(const Scene& scene, const Camera& camera, Framebuffer& fb,
                  const RenderSettings& settings, RenderStats* stats) {
  accumulate_region(scene, camera, fb, fb.bounds(), settings, stats);
}

void render_region(const Scene& scene, const Camera& camera, Framebuffer& fb, const DirtyRect& rect,
                   const RenderSettings& settings, RenderStats* stats) {
  check_inputs(scene, camera, fb);
  fb.reset(rect);
  accumulate_region(scene, camera, fb, rect, settings, stats);
}

double measure_interval_ms(const Scene& scene, const Camera& camera, int threads) {
  if (!scene.built()) throw ContractError("render: scene is not built");
  const Geometry& g = *scene.geometry;
  std::atomic<std::uint64_t> found{0};
  const auto start = std::chrono::steady_clock::now();
  for_each_tile({0, 0, camera.width, camera.height}, threads, [&](const DirtyRect& tile) {
    std::uint64_t n = 0;
    for (int y = tile.y0; y < tile.y1; ++y)
      for (int x = tile.x0; x < tile.x1; ++x) {
        const Ray ray = camera.generate_ray(x, y);
        g.bvh.closest_hit(ray, [&](std::uint32_t id, const Ray& r) -> std::optional<HitRecord> {
          if (prism_entry_exit(r, g.prisms[id])) ++n;
          return std::nullopt;
        });
      }
    found += n;
  });
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

DirtyRect dirty_rect_to_pixels(const Scene& scene, const Camera& camera, const DirtyRect& texels) {
  if (!scene.built() || texels.empty()) return {};
  const Geometry& g = *scene.geometry;
  const DisplacementMap& map = *scene.map;
  const DirtyRect full{0, 0, camera.width, camera.height};
  // Bilinear sampling reaches one texel beyond the edited cells.
  const double u0 = (texels.x0 - 1.0) / map.width();
  const double u1 = (texels.x1 + 1.0) / map.width();
  const double v0 = (texels.y0 - 1.0) / map.height();
  const double v1 = (texels.y1 + 1.0) / map.height();
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
  bool any = false;
  for (std::size_t f = 0; f < g.prisms.size(); ++f) {
    const Aabb& uv = g.uv_boxes[f];
    if (uv.max.x() < u0 || uv.min.x() > u1 || uv.max.y() < v0 || uv.min.y() > v1) continue;
    const Aabb& b = g.boxes[f];
    for (int c = 0; c < 8; ++c) {
      const Vec3 corner((c & 1) ? b.max.x() : b.min.x(), (c & 2) ? b.max.y() : b.min.y(),
                        (c & 4) ? b.max.z() : b.min.z());
      const auto q = camera.project(corner);
      if (!q) return full;
      xmin = std::min(xmin, q->x());
      xmax = std::max(xmax, q->x());
      ymin = std::min(ymin, q->y());
      ymax = std::max(ymax, q->y());
      any = true;
    }
  }
  if (!any) return {};
  const double lim = 4.0 * (camera.width + camera.height);
  DirtyRect r;
  r.x0 = static_cast<int>(std::floor(std::clamp(xmin, -lim, lim))) - 1;
  r.y0 = static_cast<int>(std::floor(std::clamp(ymin, -lim, lim))) - 1;
  r.x1 = static_cast<int>(std::ceil(std::clamp(xmax, -lim, lim))) + 1;
  r.y1 = static_cast<int>(std::ceil(std::clamp(ymax, -lim, lim))) + 1;
  r = r.intersect(full);
  return r.empty() ? DirtyRect{} : r;
}

ImageFormat format_for(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".png") return ImageFormat::kPng;
  if (ext == ".pfm") return ImageFormat::kPfm;
  throw ValidationError("unsupported image extension '" + ext + "' (use .png or .pfm)");
}

void resolve_and_write(const Framebuffer& fb, const std::filesystem::path& path, ImageFormat format,
                       double exposure) {
  if (format == ImageFormat::kPfm) {
    write_pfm(path, fb.linear());
  } else {
    write_png(path, fb.resolve(exposure));
  }
}

}  // namespace pdm
