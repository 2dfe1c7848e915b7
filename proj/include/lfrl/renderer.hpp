#pragma once

// Light-field resampling at a rigid pose and motion-blur simulation.
//
// Rendering a view at pose P reads, for every output ray, the reference
// light field along P(ray) with quadrilinear interpolation. Blur averages
// the views along a trajectory, counting only valid samples per ray.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "lfrl/geometry.hpp"
#include "lfrl/light_field.hpp"

namespace lfrl {

inline constexpr double kDefaultCoverageThreshold = 0.5;

struct BlurResult {
  LightField lf;
  ValidityMask mask;
  std::vector<double> weight;  // per ray, fraction of views with a valid sample
};

struct Sample {
  std::vector<double> values;  // one per channel
  bool in_bounds = false;      // every contributing corner lies on the grid
  bool valid = false;          // in-bounds weight >= 0.5
  double inside_weight = 0.0;
};

namespace detail {

// Indices within this distance of a grid node are snapped onto it so that
// exact resampling reproduces node values bit-for-bit.
inline constexpr double kNodeSnap = 1e-9;

struct AxisTaps {
  std::array<std::size_t, 2> index{};
  std::array<double, 2> weight{};
  int count = 0;            // in-bounds taps with nonzero weight
  double inside = 0.0;      // sum of in-bounds weights
  bool all_inside = true;
};

inline AxisTaps axis_taps(double x, std::size_t n) {
  AxisTaps a;
  const double r = std::nearbyint(x);
  if (std::abs(x - r) < kNodeSnap) x = r;
  const double fl = std::floor(x);
  const double f = x - fl;
  const double ws[2] = {1.0 - f, f};
  for (int k = 0; k < 2; ++k) {
    if (ws[k] == 0.0) continue;
    const double i = fl + k;
    if (i < 0 || i >= static_cast<double>(n)) {
      a.all_inside = false;
      continue;
    }
    a.index[a.count] = static_cast<std::size_t>(i);
    a.weight[a.count] = ws[k];
    a.inside += ws[k];
    ++a.count;
  }
  return a;
}

// Writes nc interpolated channels to out and returns the in-bounds weight
// fraction (0 when no corner is on the grid). Output is renormalized by that
// fraction. all_inside reports whether any nonzero-weight corner was dropped.
inline double interpolate(const LightField& lf, const Index4& idx, double* out, bool* all_inside = nullptr) {
  const Dims& d = lf.dims();
  const AxisTaps as = axis_taps(idx[0], d.ns);
  const AxisTaps at = axis_taps(idx[1], d.nt);
  const AxisTaps au = axis_taps(idx[2], d.nu);
  const AxisTaps av = axis_taps(idx[3], d.nv);
  if (all_inside) *all_inside = as.all_inside && at.all_inside && au.all_inside && av.all_inside;
  const double inside = as.inside * at.inside * au.inside * av.inside;
  for (std::size_t c = 0; c < d.nc; ++c) out[c] = 0.0;
  if (inside <= 0.0) return 0.0;
  const double* data = lf.data().data();
  for (int i = 0; i < as.count; ++i)
    for (int j = 0; j < at.count; ++j) {
      const double wst = as.weight[i] * at.weight[j];
      for (int k = 0; k < au.count; ++k) {
        const double wstu = wst * au.weight[k];
        for (int l = 0; l < av.count; ++l) {
          const double w = wstu * av.weight[l];
          const double* px = data + lf.offset(as.index[i], at.index[j], au.index[k], av.index[l]);
          for (std::size_t c = 0; c < d.nc; ++c) out[c] += w * px[c];
        }
      }
    }
  if (inside != 1.0) {
    for (std::size_t c = 0; c < d.nc; ++c) out[c] /= inside;
  }
  return inside;
}

// Input-grid index of output ray `idx` seen from pose p, or nullopt when
// the transformed ray is parallel to the planes.
inline std::optional<Index4> source_index(const Intrinsics& in, const Pose& p, const Index4& idx, bool identity) {
  if (identity) return idx;
  const Ray ray = index_to_ray(in, idx);
  const Ray moved{p.apply(ray.p0), p.apply(ray.p1)};
  const Eigen::Vector3d dir = moved.p1 - moved.p0;
  if (!(std::abs(dir.z()) > 1e-12 * dir.norm())) return std::nullopt;
  const double l0 = -moved.p0.z() / dir.z();
  const double l1 = (in.plane_sep - moved.p0.z()) / dir.z();
  const Eigen::Vector3d a = moved.p0 + l0 * dir;
  const Eigen::Vector3d b = moved.p0 + l1 * dir;
  return Index4{(a.x() - in.offset_st) / in.pitch_st, (a.y() - in.offset_st) / in.pitch_st,
                (b.x() - in.offset_uv) / in.pitch_uv, (b.y() - in.offset_uv) / in.pitch_uv};
}

}  // namespace detail

inline Sample sample_quadrilinear(const LightField& lf, const Index4& idx) {
  Sample s;
  s.values.resize(lf.dims().nc);
  bool all_inside = false;
  s.inside_weight = detail::interpolate(lf, idx, s.values.data(), &all_inside);
  s.in_bounds = all_inside && s.inside_weight > 0;
  s.valid = s.inside_weight >= 0.5;
  if (!s.valid) std::fill(s.values.begin(), s.values.end(), 0.0);
  return s;
}

// Averages the views of lf at each pose of traj. Summation over views runs
// in trajectory order as a running mean, so identical views average exactly.
inline BlurResult blur(const LightField& lf, const Trajectory& traj,
                       double coverage_threshold = kDefaultCoverageThreshold) {
  if (traj.size() == 0) throw std::invalid_argument("blur needs a non-empty trajectory");
  const Dims& d = lf.dims();
  const Intrinsics& in = lf.intrinsics();
  BlurResult out{LightField(d, in), ValidityMask(d, false), std::vector<double>(d.rays(), 0.0)};
  std::vector<char> identity(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) identity[k] = traj.poses[k].is_identity();
  const double n_views = static_cast<double>(traj.size());
  const long long n_st = static_cast<long long>(d.ns * d.nt);

#pragma omp parallel
  {
    std::vector<double> sample(d.nc);
#pragma omp for schedule(static)
    for (long long st = 0; st < n_st; ++st) {
      const std::size_t s = static_cast<std::size_t>(st) / d.nt;
      const std::size_t t = static_cast<std::size_t>(st) % d.nt;
      for (std::size_t u = 0; u < d.nu; ++u)
        for (std::size_t v = 0; v < d.nv; ++v) {
          const Index4 idx{double(s), double(t), double(u), double(v)};
          double* acc = out.lf.data().data() + out.lf.offset(s, t, u, v);
          int count = 0;
          for (std::size_t k = 0; k < traj.size(); ++k) {
            const auto src = detail::source_index(in, traj.poses[k], idx, identity[k] != 0);
            if (!src) continue;
            if (detail::interpolate(lf, *src, sample.data()) < 0.5) continue;
            ++count;
            for (std::size_t c = 0; c < d.nc; ++c) acc[c] += (sample[c] - acc[c]) / count;
          }
          const std::size_t ray = ((s * d.nt + t) * d.nu + u) * d.nv + v;
          out.weight[ray] = count / n_views;
          out.mask.set(ray, count > 0 && out.weight[ray] >= coverage_threshold);
        }
    }
  }
  return out;
}

// Single view at pose p: weight is 1 on rays with a valid sample, else 0
// (and the intensity is 0).
inline BlurResult resample_at_pose(const LightField& lf, const Pose& p) {
  return blur(lf, Trajectory{{p}}, 1.0);
}

}  // namespace lfrl
