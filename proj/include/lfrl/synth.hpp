#pragma once

// Miniature ray tracer for ground-truth light fields.
//
// Every (s, t) grid position is a pinhole; pixel (u, v) is the ray through
// (s, t, 0) and (u, v, D). The nearest fronto-parallel plane or sphere hit
// returns its procedural albedo (no shading). Motion-blurred ground truth
// averages still renders of the whole rig moved rigidly along the
// trajectory, so it never goes through the light-field renderer.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "lfrl/config.hpp"
#include "lfrl/geometry.hpp"
#include "lfrl/light_field.hpp"

namespace lfrl {

using Rgb = std::array<double, 3>;

enum class TextureKind { Constant, Checker, Noise };

struct Texture {
  TextureKind kind = TextureKind::Constant;
  double period = 0.05;       // checker cell size / noise lattice spacing, metric
  Rgb albedo{0.5, 0.5, 0.5};  // first checker colour / noise high value
  Rgb albedo2{0.0, 0.0, 0.0};
  std::uint64_t seed = 1;
};

struct PlaneObject {
  double depth = 1.0;
  double cx = 0.0, cy = 0.0;
  double half_w = std::numeric_limits<double>::infinity();
  double half_h = std::numeric_limits<double>::infinity();
  Texture texture;
};

struct SphereObject {
  Eigen::Vector3d center{0, 0, 2};
  double radius = 0.5;
  Texture texture;
};

using SceneObject = std::variant<PlaneObject, SphereObject>;

struct Scene {
  std::vector<SceneObject> objects;
  Rgb background{0.0, 0.0, 0.0};
};

struct SynthConfig {
  Dims dims{9, 9, 64, 64, 1};
  double plane_sep = 1.0;
  double baseline = 0.01;
  double fov = 2.0 * std::atan(0.32);  // 0.01 pixel pitch at D = 1 for Nu = 64
  int blur_substeps = 32;
  int pixel_samples = 1;  // per axis; box-filters each pixel over its u,v footprint
  double photon_peak = 1000.0;

  Intrinsics intrinsics() const { return centered_intrinsics(dims, plane_sep, baseline, fov); }

  void validate() const {
    if (dims.nc != 1 && dims.nc != 3) throw ConfigError("synth supports 1 or 3 channels");
    if (dims.rays() == 0) throw ConfigError("synth dims must be positive");
    if (!(plane_sep > 0 && baseline > 0 && fov > 0 && fov < M_PI)) throw ConfigError("invalid synth camera");
    if (blur_substeps < 1) throw ConfigError("blur_substeps must be >= 1");
    if (pixel_samples < 1) throw ConfigError("pixel_samples must be >= 1");
    if (!(photon_peak > 0)) throw ConfigError("photon_peak must be > 0");
  }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline double lattice_value(std::int64_t i, std::int64_t j, std::int64_t k, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(i));
  h = splitmix64(h ^ static_cast<std::uint64_t>(j));
  h = splitmix64(h ^ static_cast<std::uint64_t>(k));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Smoothstep-interpolated lattice noise in [0, 1].
inline double value_noise(const Eigen::Vector3d& p, std::uint64_t seed) {
  const double fx = std::floor(p.x()), fy = std::floor(p.y()), fz = std::floor(p.z());
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy),
             iz = static_cast<std::int64_t>(fz);
  auto smooth = [](double t) { return t * t * (3 - 2 * t); };
  const double wx = smooth(p.x() - fx), wy = smooth(p.y() - fy), wz = smooth(p.z() - fz);
  double acc = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) {
        const double w = (a ? wx : 1 - wx) * (b ? wy : 1 - wy) * (c ? wz : 1 - wz);
        acc += w * lattice_value(ix + a, iy + b, iz + c, seed);
      }
  return acc;
}

inline Rgb shade(const Texture& tex, const Eigen::Vector3d& p) {
  if (tex.kind == TextureKind::Constant) return tex.albedo;
  const Eigen::Vector3d q = p / tex.period;
  double mix = 0.0;
  if (tex.kind == TextureKind::Checker) {
    const auto parity = static_cast<std::int64_t>(std::floor(q.x())) + static_cast<std::int64_t>(std::floor(q.y())) +
                        static_cast<std::int64_t>(std::floor(q.z()));
    mix = (parity % 2 == 0) ? 1.0 : 0.0;
  } else {
    mix = value_noise(q, tex.seed);
  }
  return {mix * tex.albedo[0] + (1 - mix) * tex.albedo2[0], mix * tex.albedo[1] + (1 - mix) * tex.albedo2[1],
          mix * tex.albedo[2] + (1 - mix) * tex.albedo2[2]};
}

inline constexpr double kMinHitDistance = 1e-9;

}  // namespace detail

// Albedo seen along origin + lambda * dir, lambda > 0.
inline Rgb trace(const Scene& scene, const Eigen::Vector3d& origin, const Eigen::Vector3d& dir) {
  double best = std::numeric_limits<double>::infinity();
  Rgb colour = scene.background;
  for (const auto& obj : scene.objects) {
    if (const auto* pl = std::get_if<PlaneObject>(&obj)) {
      if (dir.z() == 0) continue;
      const double l = (pl->depth - origin.z()) / dir.z();
      if (!(l > detail::kMinHitDistance) || l >= best) continue;
      const Eigen::Vector3d hit = origin + l * dir;
      // Planar textures use only (x, y); z is pinned to the plane.
      if (std::abs(hit.x() - pl->cx) > pl->half_w || std::abs(hit.y() - pl->cy) > pl->half_h) continue;
      best = l;
      colour = detail::shade(pl->texture, Eigen::Vector3d(hit.x(), hit.y(), 0.0));
    } else {
      const auto& sp = std::get<SphereObject>(obj);
      const Eigen::Vector3d oc = origin - sp.center;
      const double a = dir.squaredNorm();
      const double b = oc.dot(dir);
      const double c = oc.squaredNorm() - sp.radius * sp.radius;
      const double disc = b * b - a * c;
      if (disc < 0) continue;
      const double root = std::sqrt(disc);
      double l = (-b - root) / a;
      if (!(l > detail::kMinHitDistance)) l = (-b + root) / a;
      if (!(l > detail::kMinHitDistance) || l >= best) continue;
      best = l;
      colour = detail::shade(sp.texture, origin + l * dir);
    }
  }
  return colour;
}

namespace detail {

inline void store_colour(const Rgb& c, double* out, std::size_t nc) {
  if (nc == 1) {
    out[0] = (c[0] + c[1] + c[2]) / 3.0;
  } else {
    out[0] = c[0];
    out[1] = c[1];
    out[2] = c[2];
  }
}

// Accumulates a running mean of the rig rendered at pose p into lf.
inline void render_into(const Scene& scene, const Pose& p, LightField& lf, int count, int pixel_samples) {
  const Dims& d = lf.dims();
  const Intrinsics& in = lf.intrinsics();
  const long long n_st = static_cast<long long>(d.ns * d.nt);
  const int k = pixel_samples;
#pragma omp parallel
  {
    double px[3];
#pragma omp for schedule(static)
    for (long long st = 0; st < n_st; ++st) {
      const std::size_t s = static_cast<std::size_t>(st) / d.nt;
      const std::size_t t = static_cast<std::size_t>(st) % d.nt;
      for (std::size_t u = 0; u < d.nu; ++u)
        for (std::size_t v = 0; v < d.nv; ++v) {
          Rgb sum{0, 0, 0};
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
              const double du = (i + 0.5) / k - 0.5, dv = (j + 0.5) / k - 0.5;
              const Ray r = index_to_ray(in, {double(s), double(t), u + du, v + dv});
              const Eigen::Vector3d a = p.apply(r.p0);
              const Eigen::Vector3d b = p.apply(r.p1);
              const Rgb c = trace(scene, a, b - a);
              for (int ch = 0; ch < 3; ++ch) sum[ch] += c[ch];
            }
          for (double& x : sum) x /= k * k;
          store_colour(sum, px, d.nc);
          double* acc = lf.data().data() + lf.offset(s, t, u, v);
          for (std::size_t c = 0; c < d.nc; ++c) acc[c] += (px[c] - acc[c]) / count;
        }
    }
  }
}

}  // namespace detail

inline LightField render_at_pose(const Scene& scene, const SynthConfig& cfg, const Pose& p) {
  cfg.validate();
  LightField lf(cfg.dims, cfg.intrinsics());
  detail::render_into(scene, p, lf, 1, cfg.pixel_samples);
  return lf;
}

inline LightField render_still(const Scene& scene, const SynthConfig& cfg) {
  return render_at_pose(scene, cfg, Pose::identity());
}

// Mean of blur_substeps still renders at endpoint-inclusive times in
// [-0.5, 0.5] along the constant-velocity path.
inline LightField render_blurred(const Scene& scene, const SynthConfig& cfg, const Velocity6& v) {
  cfg.validate();
  LightField lf(cfg.dims, cfg.intrinsics());
  int count = 0;
  for (double t : trajectory_times(cfg.blur_substeps)) {
    detail::render_into(scene, pose_from_velocity(v, t), lf, ++count, cfg.pixel_samples);
  }
  return lf;
}

namespace detail {

// Counter-based uniform stream: draw k of sample i depends only on
// (seed, i, k), so noise is identical under any parallel partition.
inline double uniform01(std::uint64_t seed, std::uint64_t index, std::uint64_t draw) {
  const std::uint64_t h = splitmix64(splitmix64(seed ^ 0x5851f42d4c957f2dull) ^ splitmix64(index) ^ (draw * 0xd1b54a32d192ed03ull));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline constexpr double kPoissonNormalAbove = 1000.0;
inline constexpr double kPoissonChunk = 500.0;

inline double poisson_inversion(double mean, std::uint64_t seed, std::uint64_t index, std::uint64_t& draw) {
  const double u = uniform01(seed, index, draw++);
  double p = std::exp(-mean);
  double cdf = p;
  double k = 0;
  const double cap = mean + 40.0 * std::sqrt(mean) + 100.0;
  while (u > cdf && k < cap) {
    k += 1;
    p *= mean / k;
    cdf += p;
  }
  return k;
}

// Inversion for means up to 1000 (split into chunks so exp(-mean) stays
// representable; a sum of Poisson variates is Poisson), rounded normal
// approximation above.
inline double poisson_sample(double mean, std::uint64_t seed, std::uint64_t index) {
  if (mean <= 0) return 0.0;
  std::uint64_t draw = 0;
  if (mean > kPoissonNormalAbove) {
    const double u1 = 1.0 - uniform01(seed, index, draw++);
    const double u2 = uniform01(seed, index, draw++);
    const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    return std::max(0.0, std::nearbyint(mean + std::sqrt(mean) * z));
  }
  const int chunks = static_cast<int>(std::ceil(mean / kPoissonChunk));
  const double part = mean / chunks;
  double total = 0;
  for (int c = 0; c < chunks; ++c) total += poisson_inversion(part, seed, index, draw);
  return total;
}

}  // namespace detail

inline LightField add_poisson(const LightField& lf, double photon_peak, std::uint64_t seed) {
  if (!(photon_peak > 0)) throw std::invalid_argument("photon_peak must be > 0");
  if (!lf.finite_nonnegative()) throw std::invalid_argument("add_poisson needs finite nonnegative intensities");
  LightField out = lf;
  auto data = out.data();
  const long long n = static_cast<long long>(data.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    data[k] = detail::poisson_sample(data[k] * photon_peak, seed, k) / photon_peak;
  }
  return out;
}

// Scene text schema (see scenes/*.scene):
//   background = 0.2                     grey or r,g,b
//   object.<name>.type = plane | sphere
//   object.<name>.depth = 1.5            plane z
//   object.<name>.center = x,y | x,y,z   plane centre (x,y) / sphere centre
//   object.<name>.size = w,h             plane half extents (default infinite)
//   object.<name>.radius = 0.3           sphere
//   object.<name>.texture = constant | checker | noise
//   object.<name>.period = 0.04
//   object.<name>.albedo = 0.9 | r,g,b
//   object.<name>.albedo2 = 0.1 | r,g,b
//   object.<name>.seed = 3               noise lattice seed
// Objects keep the order in which their names first appear.
inline Scene scene_from_config(const KeyValueConfig& cfg) {
  auto colour = [&](const std::string& key, Rgb fallback) {
    auto xs = cfg.get_list(key, {fallback[0], fallback[1], fallback[2]});
    if (xs.size() == 1) xs = {xs[0], xs[0], xs[0]};
    if (xs.size() != 3) throw ConfigError(key + ": expected 1 or 3 values");
    for (double x : xs) {
      if (!(x >= 0 && x <= 1)) throw ConfigError(key + ": albedo must lie in [0, 1]");
    }
    return Rgb{xs[0], xs[1], xs[2]};
  };

  Scene scene;
  scene.background = colour("background", {0, 0, 0});
  std::vector<std::string> names;
  for (const auto& key : cfg.keys()) {
    if (key.rfind("object.", 0) != 0) {
      if (key != "background") throw ConfigError("unknown scene key '" + key + "'");
      continue;
    }
    const auto dot = key.find('.', 7);
    if (dot == std::string::npos) throw ConfigError("scene key '" + key + "' lacks a field");
    const std::string name = key.substr(7, dot - 7);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  }

  for (const auto& name : names) {
    const std::string pre = "object." + name + ".";
    Texture tex;
    const std::string kind = cfg.get_string(pre + "texture", "constant");
    if (kind == "constant") tex.kind = TextureKind::Constant;
    else if (kind == "checker") tex.kind = TextureKind::Checker;
    else if (kind == "noise") tex.kind = TextureKind::Noise;
    else throw ConfigError(pre + "texture: unknown texture '" + kind + "'");
    tex.period = cfg.get_double(pre + "period", tex.period);
    if (!(tex.period > 0)) throw ConfigError(pre + "period must be > 0");
    tex.albedo = colour(pre + "albedo", tex.albedo);
    tex.albedo2 = colour(pre + "albedo2", tex.albedo2);
    tex.seed = static_cast<std::uint64_t>(cfg.get_int(pre + "seed", 1));

    const std::string type = cfg.get_string(pre + "type", "");
    if (type == "plane") {
      PlaneObject pl;
      pl.texture = tex;
      pl.depth = cfg.get_double(pre + "depth", pl.depth);
      if (!(pl.depth > 0)) throw ConfigError(pre + "depth must be > 0");
      const auto c = cfg.get_list(pre + "center", {0, 0});
      if (c.size() != 2) throw ConfigError(pre + "center: plane centre takes x,y");
      pl.cx = c[0];
      pl.cy = c[1];
      if (cfg.has(pre + "size")) {
        const auto sz = cfg.get_list(pre + "size");
        if (sz.size() != 2 || !(sz[0] > 0 && sz[1] > 0)) throw ConfigError(pre + "size: expected positive w,h");
        pl.half_w = sz[0];
        pl.half_h = sz[1];
      }
      scene.objects.emplace_back(pl);
    } else if (type == "sphere") {
      SphereObject sp;
      sp.texture = tex;
      const auto c = cfg.get_list(pre + "center", {0, 0, 2});
      if (c.size() != 3) throw ConfigError(pre + "center: sphere centre takes x,y,z");
      sp.center = {c[0], c[1], c[2]};
      if (!(sp.center.z() > 0)) throw ConfigError(pre + "center: sphere must lie in front of the camera");
      sp.radius = cfg.get_double(pre + "radius", sp.radius);
      if (!(sp.radius > 0)) throw ConfigError(pre + "radius must be > 0");
      scene.objects.emplace_back(sp);
    } else {
      throw ConfigError(pre + "type: expected plane or sphere, got '" + type + "'");
    }
  }
  return scene;
}

inline Scene load_scene(const std::string& path) { return scene_from_config(KeyValueConfig::load(path)); }

}  // namespace lfrl
