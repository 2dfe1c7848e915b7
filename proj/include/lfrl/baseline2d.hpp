#pragma once

// Conventional 2-D Richardson-Lucy with a linear motion kernel:
//   I <- I * ((B / (I (x) k)) (x) k~)
// with k~ the kernel rotated by 180 degrees and replicate boundaries.

#include <algorithm>
#include <cmath>
#include <vector>

#include "lfrl/light_field.hpp"

namespace lfrl {

// Square tap grid of side 2 * radius + 1, centre tap at (radius, radius),
// indexed tap(du, dv) with du along u.
struct Kernel2D {
  double length = 0;
  double angle = 0;
  int radius = 0;
  std::vector<double> taps{1.0};

  int side() const { return 2 * radius + 1; }
  double tap(int du, int dv) const { return taps[static_cast<std::size_t>((du + radius) * side() + dv + radius)]; }

  Kernel2D reversed() const {
    Kernel2D k = *this;
    std::reverse(k.taps.begin(), k.taps.end());
    k.angle = angle + M_PI;
    return k;
  }

  double sum() const {
    double s = 0;
    for (double x : taps) s += x;
    return s;
  }
};

// Box of `length` pixels centred on the origin along direction `angle`
// (radians from the u axis). Each tap receives the integral of its bilinear
// hat over the segment, which gives fractional weights at the endpoints.
inline Kernel2D linear_motion_kernel(double length, double angle) {
  if (!(length >= 0) || !std::isfinite(length) || !std::isfinite(angle)) {
    throw std::invalid_argument("kernel length must be finite and >= 0");
  }
  Kernel2D k;
  k.length = length;
  k.angle = angle;
  if (length == 0) return k;
  k.radius = static_cast<int>(std::ceil(length / 2)) + 1;
  const int side = k.side();
  k.taps.assign(static_cast<std::size_t>(side * side), 0.0);
  const double cu = std::cos(angle), cv = std::sin(angle);
  const int steps = std::max(1024, static_cast<int>(256 * length));
  for (int i = 0; i < steps; ++i) {
    const double r = -length / 2 + length * (i + 0.5) / steps;
    const double x = r * cu + k.radius, y = r * cv + k.radius;
    const double fx = std::floor(x), fy = std::floor(y);
    const double ax = x - fx, ay = y - fy;
    const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
    const double w[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
    const int px[4] = {ix, ix + 1, ix, ix + 1};
    const int py[4] = {iy, iy, iy + 1, iy + 1};
    for (int c = 0; c < 4; ++c) {
      if (px[c] < 0 || py[c] < 0 || px[c] >= side || py[c] >= side) continue;
      k.taps[static_cast<std::size_t>(px[c] * side + py[c])] += w[c];
    }
  }
  const double total = k.sum();
  for (double& x : k.taps) x /= total;
  return k;
}

// out(u, v) = sum k(du, dv) in(u - du, v - dv), coordinates clamped.
inline Image convolve(const Image& img, const Kernel2D& k) {
  Image out(img.nu, img.nv, img.nc);
  const int nu = static_cast<int>(img.nu), nv = static_cast<int>(img.nv);
#pragma omp parallel for schedule(static)
  for (int u = 0; u < nu; ++u)
    for (int v = 0; v < nv; ++v)
      for (int du = -k.radius; du <= k.radius; ++du)
        for (int dv = -k.radius; dv <= k.radius; ++dv) {
          const double w = k.tap(du, dv);
          if (w == 0) continue;
          const auto su = static_cast<std::size_t>(std::clamp(u - du, 0, nu - 1));
          const auto sv = static_cast<std::size_t>(std::clamp(v - dv, 0, nv - 1));
          for (std::size_t c = 0; c < img.nc; ++c) {
            out(static_cast<std::size_t>(u), static_cast<std::size_t>(v), c) += w * img(su, sv, c);
          }
        }
  return out;
}

inline Image rl2d(const Image& observed, const Kernel2D& k, int iterations, double ratio_floor = 1e-6) {
  if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
  for (double x : observed.data) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("rl2d input must be finite and >= 0");
  }
  const Kernel2D flipped = k.reversed();
  Image estimate = observed;
  Image ratio(observed.nu, observed.nv, observed.nc);
  for (int it = 0; it < iterations; ++it) {
    const Image forward = convolve(estimate, k);
    for (std::size_t i = 0; i < ratio.data.size(); ++i) {
      ratio.data[i] = observed.data[i] / std::max(forward.data[i], ratio_floor);
    }
    const Image correction = convolve(ratio, flipped);
    for (std::size_t i = 0; i < estimate.data.size(); ++i) estimate.data[i] *= correction.data[i];
  }
  return estimate;
}

}  // namespace lfrl
