#pragma once

// Light-field container and two-plane coordinate conventions.
//
// A ray is identified by its intersections with the camera plane z = 0 at
// (s, t) and the image plane z = D at (u, v), both in absolute metric
// coordinates. Samples are stored row-major with s slowest and channel
// fastest, so each (s, t) sub-aperture image is one contiguous block.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lfrl/errors.hpp"

namespace lfrl {

struct Dims {
  std::size_t ns = 1;
  std::size_t nt = 1;
  std::size_t nu = 1;
  std::size_t nv = 1;
  std::size_t nc = 1;

  std::size_t rays() const { return ns * nt * nu * nv; }
  std::size_t samples() const { return rays() * nc; }
  std::size_t view_size() const { return nu * nv * nc; }
  std::array<std::size_t, 4> extents() const { return {ns, nt, nu, nv}; }

  bool operator==(const Dims&) const = default;
};

inline std::string to_string(const Dims& d) {
  return std::to_string(d.ns) + "x" + std::to_string(d.nt) + "x" + std::to_string(d.nu) + "x" +
         std::to_string(d.nv) + "x" + std::to_string(d.nc);
}

struct Intrinsics {
  double plane_sep = 1.0;  // D, distance between the s,t and u,v planes
  double pitch_st = 1.0;
  double pitch_uv = 1.0;
  double offset_st = 0.0;  // metric coordinate of index 0, shared by s and t
  double offset_uv = 0.0;  // metric coordinate of index 0, shared by u and v

  bool valid() const {
    return std::isfinite(plane_sep) && std::isfinite(pitch_st) && std::isfinite(pitch_uv) &&
           std::isfinite(offset_st) && std::isfinite(offset_uv) && plane_sep > 0 &&
           pitch_st > 0 && pitch_uv > 0;
  }

  bool operator==(const Intrinsics&) const = default;
};

// Intrinsics with both planes centered on the optical axis. The u,v pitch
// spans the field of view at the image plane.
inline Intrinsics centered_intrinsics(const Dims& dims, double plane_sep, double baseline,
                                      double fov) {
  Intrinsics in;
  in.plane_sep = plane_sep;
  in.pitch_st = baseline;
  in.pitch_uv = plane_sep * std::tan(fov / 2) * 2 / static_cast<double>(dims.nu);
  in.offset_st = -0.5 * static_cast<double>(dims.ns - 1) * in.pitch_st;
  in.offset_uv = -0.5 * static_cast<double>(dims.nu - 1) * in.pitch_uv;
  return in;
}

using Index4 = std::array<double, 4>;  // fractional (s, t, u, v) index

struct Ray {
  Eigen::Vector3d p0;  // on z = 0 for canonical rays
  Eigen::Vector3d p1;  // on z = D for canonical rays
};

inline Ray index_to_ray(const Intrinsics& in, const Index4& idx) {
  return {Eigen::Vector3d(in.offset_st + idx[0] * in.pitch_st, in.offset_st + idx[1] * in.pitch_st, 0),
          Eigen::Vector3d(in.offset_uv + idx[2] * in.pitch_uv, in.offset_uv + idx[3] * in.pitch_uv,
                          in.plane_sep)};
}

// Re-intersects an arbitrary ray with z = 0 and z = D. Throws
// DegenerateRayError when the ray is parallel to the planes.
inline Ray canonicalize(const Ray& ray, double plane_sep) {
  if (ray.p0.z() == 0.0 && ray.p1.z() == plane_sep) return ray;
  const Eigen::Vector3d d = ray.p1 - ray.p0;
  if (!(std::abs(d.z()) > 1e-12 * d.norm())) {
    throw DegenerateRayError("ray is parallel to the parameterization planes");
  }
  const double l0 = -ray.p0.z() / d.z();
  const double l1 = (plane_sep - ray.p0.z()) / d.z();
  Ray out{ray.p0 + l0 * d, ray.p0 + l1 * d};
  out.p0.z() = 0.0;
  out.p1.z() = plane_sep;
  return out;
}

inline Index4 ray_to_index(const Intrinsics& in, const Ray& ray) {
  const Ray r = canonicalize(ray, in.plane_sep);
  return {(r.p0.x() - in.offset_st) / in.pitch_st, (r.p0.y() - in.offset_st) / in.pitch_st,
          (r.p1.x() - in.offset_uv) / in.pitch_uv, (r.p1.y() - in.offset_uv) / in.pitch_uv};
}

// 2-D image (u horizontal, v vertical), stored u-major with channel fastest
// to match a sub-aperture block of a LightField.
struct Image {
  std::size_t nu = 0;
  std::size_t nv = 0;
  std::size_t nc = 1;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t u, std::size_t v, std::size_t c, double fill = 0.0)
      : nu(u), nv(v), nc(c), data(u * v * c, fill) {}

  std::size_t offset(std::size_t u, std::size_t v, std::size_t c = 0) const {
    return (u * nv + v) * nc + c;
  }
  double& operator()(std::size_t u, std::size_t v, std::size_t c = 0) { return data[offset(u, v, c)]; }
  double operator()(std::size_t u, std::size_t v, std::size_t c = 0) const {
    return data[offset(u, v, c)];
  }
  bool same_shape(const Image& o) const { return nu == o.nu && nv == o.nv && nc == o.nc; }
};

class LightField {
 public:
  LightField() = default;

  LightField(const Dims& dims, const Intrinsics& intrinsics, double fill = 0.0)
      : dims_(dims), intrinsics_(intrinsics), data_(dims.samples(), fill) {
    check();
  }

  LightField(const Dims& dims, const Intrinsics& intrinsics, std::vector<double> data)
      : dims_(dims), intrinsics_(intrinsics), data_(std::move(data)) {
    check();
    if (data_.size() != dims_.samples()) {
      throw ShapeError("light field data length " + std::to_string(data_.size()) +
                       " does not match dims " + to_string(dims_));
    }
  }

  const Dims& dims() const { return dims_; }
  const Intrinsics& intrinsics() const { return intrinsics_; }

  std::size_t offset(std::size_t s, std::size_t t, std::size_t u, std::size_t v,
                     std::size_t c = 0) const {
    return (((s * dims_.nt + t) * dims_.nu + u) * dims_.nv + v) * dims_.nc + c;
  }
  double& operator()(std::size_t s, std::size_t t, std::size_t u, std::size_t v, std::size_t c = 0) {
    return data_[offset(s, t, u, v, c)];
  }
  double operator()(std::size_t s, std::size_t t, std::size_t u, std::size_t v,
                    std::size_t c = 0) const {
    return data_[offset(s, t, u, v, c)];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::vector<double>& storage() { return data_; }

  bool same_shape(const LightField& o) const { return dims_ == o.dims_; }

  bool finite_nonnegative() const {
    for (double x : data_) {
      if (!std::isfinite(x) || x < 0) return false;
    }
    return true;
  }

  bool operator==(const LightField&) const = default;

 private:
  void check() const {
    if (dims_.ns == 0 || dims_.nt == 0 || dims_.nu == 0 || dims_.nv == 0 || dims_.nc == 0) {
      throw ShapeError("light field dims must be positive, got " + to_string(dims_));
    }
    if (!intrinsics_.valid()) throw std::invalid_argument("invalid light field intrinsics");
  }

  Dims dims_;
  Intrinsics intrinsics_;
  std::vector<double> data_;
};

// Per-ray boolean grid over (s, t, u, v).
class ValidityMask {
 public:
  ValidityMask() = default;
  explicit ValidityMask(const Dims& dims, bool fill = true)
      : dims_{dims.ns, dims.nt, dims.nu, dims.nv, 1}, flags_(dims.rays(), fill ? 1 : 0) {}

  const Dims& dims() const { return dims_; }
  std::size_t size() const { return flags_.size(); }
  bool operator[](std::size_t ray) const { return flags_[ray] != 0; }
  void set(std::size_t ray, bool value) { flags_[ray] = value ? 1 : 0; }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto f : flags_) n += f;
    return n;
  }
  bool matches(const Dims& d) const {
    return dims_.ns == d.ns && dims_.nt == d.nt && dims_.nu == d.nu && dims_.nv == d.nv;
  }
  bool operator==(const ValidityMask&) const = default;

 private:
  Dims dims_{};
  std::vector<std::uint8_t> flags_;
};

inline ValidityMask operator&(const ValidityMask& a, const ValidityMask& b) {
  if (!a.matches(b.dims())) throw ShapeError("mask dims differ");
  ValidityMask out(a.dims(), false);
  for (std::size_t i = 0; i < a.size(); ++i) out.set(i, a[i] && b[i]);
  return out;
}

inline Image view(const LightField& lf, std::size_t s, std::size_t t) {
  const Dims& d = lf.dims();
  if (s >= d.ns || t >= d.nt) throw std::out_of_range("view index outside aperture");
  Image img(d.nu, d.nv, d.nc);
  const auto first = lf.data().begin() + static_cast<std::ptrdiff_t>(lf.offset(s, t, 0, 0));
  std::copy(first, first + static_cast<std::ptrdiff_t>(d.view_size()), img.data.begin());
  return img;
}

inline std::pair<std::size_t, std::size_t> central_index(const Dims& d) { return {d.ns / 2, d.nt / 2}; }

inline Image central_view(const LightField& lf) {
  const auto [s, t] = central_index(lf.dims());
  return view(lf, s, t);
}

inline ValidityMask central_view_mask(const ValidityMask& mask) {
  const Dims& d = mask.dims();
  const auto [s, t] = central_index(d);
  Dims vd{1, 1, d.nu, d.nv, 1};
  ValidityMask out(vd, false);
  const std::size_t base = (s * d.nt + t) * d.nu * d.nv;
  for (std::size_t i = 0; i < d.nu * d.nv; ++i) out.set(i, mask[base + i]);
  return out;
}

// Drops `border` views from each side of the s and t axes. The st offset is
// shifted so retained rays keep their metric coordinates.
inline LightField crop_views(const LightField& lf, std::size_t border) {
  if (border == 0) return lf;
  const Dims& d = lf.dims();
  if (2 * border >= d.ns || 2 * border >= d.nt) {
    throw ShapeError("crop border " + std::to_string(border) + " removes every view");
  }
  Dims out_dims = d;
  out_dims.ns -= 2 * border;
  out_dims.nt -= 2 * border;
  Intrinsics in = lf.intrinsics();
  in.offset_st += static_cast<double>(border) * in.pitch_st;
  LightField out(out_dims, in);
  for (std::size_t s = 0; s < out_dims.ns; ++s) {
    for (std::size_t t = 0; t < out_dims.nt; ++t) {
      const auto src = lf.data().begin() + static_cast<std::ptrdiff_t>(lf.offset(s + border, t + border, 0, 0));
      std::copy(src, src + static_cast<std::ptrdiff_t>(d.view_size()),
                out.data().begin() + static_cast<std::ptrdiff_t>(out.offset(s, t, 0, 0)));
    }
  }
  return out;
}

}  // namespace lfrl
