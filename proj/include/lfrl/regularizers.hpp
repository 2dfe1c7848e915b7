#pragma once

// 4-D finite differences and the two smoothed regularizers used by the
// deblurring iteration.
//
//   R_tv = sum sqrt(grad^T A grad + eps)             A = diag(a_s, a_t, a_u, a_v)
//   R_ep = sum sqrt(g^2 + eps),  g = L_s L_v - L_u L_t
//
// E_tv and E_ep are divergences of the corresponding normalized flux fields.
// The divergence is the exact negative adjoint of gradient4, so that
// dR[L](dL) = -<E, dL> holds for the discrete functionals. In the interior
// it is the central-difference divergence.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lfrl/light_field.hpp"

namespace lfrl {

struct RegConfig {
  double rho_tv = 0.01;
  double rho_ep = 0.05;
  std::array<double, 4> d_tensor{8.0, 8.0, 1.0, 1.0};  // (a_s, a_t, a_u, a_v)
  double eps_smooth = 1e-4;

  static RegConfig none() {
    RegConfig r;
    r.rho_tv = 0;
    r.rho_ep = 0;
    return r;
  }

  bool enabled() const { return rho_tv > 0 || rho_ep > 0; }

  void validate() const {
    if (!(std::isfinite(rho_tv) && rho_tv >= 0)) throw ConfigError("rho_tv must be finite and >= 0");
    if (!(std::isfinite(rho_ep) && rho_ep >= 0)) throw ConfigError("rho_ep must be finite and >= 0");
    for (double a : d_tensor) {
      if (!(std::isfinite(a) && a > 0)) throw ConfigError("d_tensor entries must be finite and > 0");
    }
    if (!(std::isfinite(eps_smooth) && eps_smooth > 0)) throw ConfigError("eps_smooth must be > 0");
  }
};

// Components in (s, t, u, v) order, each with one entry per sample.
struct Gradient4 {
  std::array<std::vector<double>, 4> d;
};

namespace detail {

struct AxisLayout {
  std::size_t n;       // extent along the axis
  std::size_t stride;  // distance between neighbours along the axis
  std::size_t outer;   // number of blocks of n * stride samples
};

inline std::array<AxisLayout, 4> axis_layouts(const Dims& dims) {
  const std::size_t sv = dims.nc;
  const std::size_t su = dims.nv * sv;
  const std::size_t st = dims.nu * su;
  const std::size_t ss = dims.nt * st;
  const std::size_t total = dims.samples();
  return {AxisLayout{dims.ns, ss, total / (dims.ns * ss)}, AxisLayout{dims.nt, st, total / (dims.nt * st)},
          AxisLayout{dims.nu, su, total / (dims.nu * su)}, AxisLayout{dims.nv, sv, total / (dims.nv * sv)}};
}

// Central differences inside, one-sided at the ends, zero for n < 2.
inline void diff_axis(const double* f, double* g, const AxisLayout& ax) {
  const std::size_t n = ax.n, h = ax.stride;
  const long long lines = static_cast<long long>(ax.outer * h);
#pragma omp parallel for schedule(static)
  for (long long line = 0; line < lines; ++line) {
    const std::size_t base = (static_cast<std::size_t>(line) / h) * n * h + static_cast<std::size_t>(line) % h;
    const double* x = f + base;
    double* y = g + base;
    if (n < 2) {
      y[0] = 0.0;
      continue;
    }
    y[0] = x[h] - x[0];
    for (std::size_t i = 1; i + 1 < n; ++i) y[i * h] = 0.5 * (x[(i + 1) * h] - x[(i - 1) * h]);
    y[(n - 1) * h] = x[(n - 1) * h] - x[(n - 2) * h];
  }
}

// out += -(D_axis)^T y, i.e. the negative adjoint of diff_axis.
inline void add_neg_adjoint_axis(const double* y, double* out, const AxisLayout& ax) {
  const std::size_t n = ax.n, h = ax.stride;
  if (n < 2) return;
  const long long lines = static_cast<long long>(ax.outer * h);
#pragma omp parallel for schedule(static)
  for (long long line = 0; line < lines; ++line) {
    const std::size_t base = (static_cast<std::size_t>(line) / h) * n * h + static_cast<std::size_t>(line) % h;
    const double* q = y + base;
    double* o = out + base;
    // Row 0: -1 at 0, +1 at 1.   Row n-1: -1 at n-2, +1 at n-1.
    // Interior row i: -1/2 at i-1, +1/2 at i+1.
    o[0] += q[0];
    o[h] -= q[0];
    o[(n - 2) * h] += q[(n - 1) * h];
    o[(n - 1) * h] -= q[(n - 1) * h];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      o[(i - 1) * h] += 0.5 * q[i * h];
      o[(i + 1) * h] -= 0.5 * q[i * h];
    }
  }
}

}  // namespace detail

inline Gradient4 gradient4(const LightField& lf) {
  Gradient4 g;
  const auto axes = detail::axis_layouts(lf.dims());
  for (std::size_t k = 0; k < 4; ++k) {
    g.d[k].assign(lf.dims().samples(), 0.0);
    detail::diff_axis(lf.data().data(), g.d[k].data(), axes[k]);
  }
  return g;
}

// Divergence of a 4-component field laid out like gradient4's output.
inline LightField divergence4(const Gradient4& field, const LightField& like) {
  LightField out(like.dims(), like.intrinsics());
  const auto axes = detail::axis_layouts(like.dims());
  for (std::size_t k = 0; k < 4; ++k) {
    detail::add_neg_adjoint_axis(field.d[k].data(), out.data().data(), axes[k]);
  }
  return out;
}

inline Gradient4 tv_flux(const Gradient4& g, const RegConfig& cfg) {
  Gradient4 f;
  const std::size_t n = g.d[0].size();
  for (auto& c : f.d) c.resize(n);
  const auto& a = cfg.d_tensor;
  for (std::size_t i = 0; i < n; ++i) {
    double q = cfg.eps_smooth;
    for (std::size_t k = 0; k < 4; ++k) q += a[k] * g.d[k][i] * g.d[k][i];
    const double inv = 1.0 / std::sqrt(q);
    for (std::size_t k = 0; k < 4; ++k) f.d[k][i] = a[k] * g.d[k][i] * inv;
  }
  return f;
}

inline Gradient4 ep_flux(const Gradient4& g, const RegConfig& cfg) {
  Gradient4 f;
  const std::size_t n = g.d[0].size();
  for (auto& c : f.d) c.resize(n);
  const auto& [gs, gt, gu, gv] = g.d;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = gs[i] * gv[i] - gu[i] * gt[i];
    const double w = e / std::sqrt(e * e + cfg.eps_smooth);
    f.d[0][i] = w * gv[i];
    f.d[1][i] = -w * gu[i];
    f.d[2][i] = -w * gt[i];
    f.d[3][i] = w * gs[i];
  }
  return f;
}

// Equiparallax residual g = L_s L_v - L_u L_t per sample.
inline std::vector<double> equiparallax_residual(const Gradient4& g) {
  std::vector<double> r(g.d[0].size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = g.d[0][i] * g.d[3][i] - g.d[2][i] * g.d[1][i];
  return r;
}

inline LightField e_tv(const LightField& lf, const RegConfig& cfg) {
  return divergence4(tv_flux(gradient4(lf), cfg), lf);
}

inline LightField e_ep(const LightField& lf, const RegConfig& cfg) {
  return divergence4(ep_flux(gradient4(lf), cfg), lf);
}

inline double r_tv(const Gradient4& g, const RegConfig& cfg) {
  double sum = 0.0;
  const auto& a = cfg.d_tensor;
  for (std::size_t i = 0; i < g.d[0].size(); ++i) {
    double q = cfg.eps_smooth;
    for (std::size_t k = 0; k < 4; ++k) q += a[k] * g.d[k][i] * g.d[k][i];
    sum += std::sqrt(q);
  }
  return sum;
}

inline double r_ep(const Gradient4& g, const RegConfig& cfg) {
  double sum = 0.0;
  for (double e : equiparallax_residual(g)) sum += std::sqrt(e * e + cfg.eps_smooth);
  return sum;
}

inline double r_tv(const LightField& lf, const RegConfig& cfg) { return r_tv(gradient4(lf), cfg); }
inline double r_ep(const LightField& lf, const RegConfig& cfg) { return r_ep(gradient4(lf), cfg); }

}  // namespace lfrl
