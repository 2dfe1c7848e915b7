#pragma once

// Light-field Richardson-Lucy deblurring.
//
// Each iteration renders the forward blur of the current estimate along the
// camera trajectory, divides the observation by it, renders the ratio along
// the reversed trajectory and applies the result multiplicatively:
//
//   L <- L * reverse_blur(B / forward_blur(L)) / (1 - rho_tv E_tv - rho_ep E_ep)
//
// The regularizer terms are evaluated on the current estimate (lagged).
//
// Rays the forward model cannot cover are treated as missing observations by
// default: the reverse blur averages the ratio over covered rays only,
//   reverse_blur(m * ratio) / reverse_blur(m),
// so views near the aperture edge are still updated from the observations
// that see them. Setting missing_data = false instead puts a ratio of 1 on
// uncovered rays.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lfrl/geometry.hpp"
#include "lfrl/light_field.hpp"
#include "lfrl/metrics.hpp"
#include "lfrl/regularizers.hpp"
#include "lfrl/renderer.hpp"

namespace lfrl {

// Smallest positive coverage; keeps every ray touched by at least one sample.
inline constexpr double kAnyCoverage = 1e-12;

struct RLConfig {
  int iterations = 50;
  int n_steps = 10;
  double ratio_floor = 1e-6;
  double denom_lo = 0.2;
  double denom_hi = 5.0;
  // Rays whose forward blur is only partly covered are left out of the ratio;
  // renormalized partial averages bias the estimate as iterations accumulate.
  double coverage_threshold = 1.0;
  bool missing_data = true;

  void validate() const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (!(ratio_floor > 0)) throw ConfigError("ratio_floor must be > 0");
    if (!(denom_lo > 0 && denom_lo < 1 && denom_hi > 1 && std::isfinite(denom_hi))) {
      throw ConfigError("denominator clamp must satisfy 0 < lo < 1 < hi");
    }
    if (!(coverage_threshold > 0 && coverage_threshold <= 1)) {
      throw ConfigError("coverage_threshold must lie in (0, 1]");
    }
  }
};

struct IterationDiagnostics {
  int iteration = 0;
  double log_likelihood = 0;
  double r_tv = 0;
  double r_ep = 0;
  double min = 0;
  double max = 0;
  std::optional<double> db;
};

struct DeblurOptions {
  const LightField* truth = nullptr;  // enables the dB column
  bool full_lf_db = false;            // dB over the whole LF instead of the central view
  std::function<void(const IterationDiagnostics&)> on_iteration;
};

struct DeblurResult {
  LightField lf;
  ValidityMask mask;  // rays covered by the forward model and the input mask
  double initial_log_likelihood = 0;
  std::vector<IterationDiagnostics> diagnostics;
};

inline DeblurResult rl_deblur(const LightField& observed, const Trajectory& traj, const RLConfig& rl,
                              const RegConfig& reg, const ValidityMask& mask,
                              const DeblurOptions& opts = {}) {
  rl.validate();
  reg.validate();
  if (!mask.matches(observed.dims())) throw ShapeError("validity mask does not match the light field");
  if (opts.truth && !opts.truth->same_shape(observed)) throw ShapeError("truth light field shape differs");
  for (double x : observed.data()) {
    if (!(x >= 0) || !std::isfinite(x)) throw std::invalid_argument("observed light field must be finite and >= 0");
  }

  const Trajectory reversed = reverse(traj);
  const std::size_t nc = observed.dims().nc;
  const std::size_t n = observed.dims().samples();
  const auto obs = observed.data();

  LightField estimate = observed;
  BlurResult forward = blur(estimate, traj, rl.coverage_threshold);
  const ValidityMask used = forward.mask & mask;
  Gradient4 grad;
  if (reg.enabled()) grad = gradient4(estimate);

  DeblurResult result;
  result.initial_log_likelihood = poisson_loglik(obs, forward.lf.data(), &used, nc);

  LightField ratio(observed.dims(), observed.intrinsics(), 1.0);
  // Reverse blur of the coverage indicator; fixed because `used` is.
  BlurResult seen;
  if (rl.missing_data) {
    LightField coverage(observed.dims(), observed.intrinsics(), 0.0);
    for (std::size_t i = 0; i < n; ++i) coverage.data()[i] = used[i / nc] ? 1.0 : 0.0;
    seen = blur(coverage, reversed, kAnyCoverage);
  }
  for (int it = 1; it <= rl.iterations; ++it) {
    auto rdata = ratio.data();
    const auto fdata = forward.lf.data();
    for (std::size_t i = 0; i < n; ++i) {
      rdata[i] = used[i / nc] ? obs[i] / std::max(fdata[i], rl.ratio_floor) : (rl.missing_data ? 0.0 : 1.0);
    }
    BlurResult correction = blur(ratio, reversed, rl.missing_data ? kAnyCoverage : rl.coverage_threshold);
    if (rl.missing_data) {
      auto cdata = correction.lf.data();
      const auto sdata = seen.lf.data();
      for (std::size_t i = 0; i < n; ++i) {
        const bool ok = sdata[i] > 0;
        cdata[i] = ok ? cdata[i] / sdata[i] : 1.0;
        if (i % nc == 0) correction.mask.set(i / nc, ok);
      }
    }

    std::vector<double> denom;
    if (reg.enabled()) {
      denom.assign(n, 1.0);
      if (reg.rho_tv > 0) {
        const LightField e = divergence4(tv_flux(grad, reg), estimate);
        for (std::size_t i = 0; i < n; ++i) denom[i] -= reg.rho_tv * e.data()[i];
      }
      if (reg.rho_ep > 0) {
        const LightField e = divergence4(ep_flux(grad, reg), estimate);
        for (std::size_t i = 0; i < n; ++i) denom[i] -= reg.rho_ep * e.data()[i];
      }
      for (double& x : denom) x = std::clamp(x, rl.denom_lo, rl.denom_hi);
    }

    auto est = estimate.data();
    const auto cdata = correction.lf.data();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t ray = i / nc;
      if (!mask[ray] || !correction.mask[ray]) continue;
      double x = est[i] * cdata[i];
      if (!denom.empty()) x /= denom[i];
      est[i] = x;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(est[i])) {
        throw NumericalError("non-finite value in iterate " + std::to_string(it) + " at sample " +
                             std::to_string(i));
      }
    }

    forward = blur(estimate, traj, rl.coverage_threshold);
    grad = gradient4(estimate);

    IterationDiagnostics diag;
    diag.iteration = it;
    diag.log_likelihood = poisson_loglik(obs, forward.lf.data(), &used, nc);
    diag.r_tv = r_tv(grad, reg);
    diag.r_ep = r_ep(grad, reg);
    const auto [mn, mx] = std::minmax_element(est.begin(), est.end());
    diag.min = *mn;
    diag.max = *mx;
    if (opts.truth) {
      diag.db = opts.full_lf_db ? db_error(estimate, *opts.truth) : central_db(estimate, *opts.truth);
    }
    if (opts.on_iteration) opts.on_iteration(diag);
    result.diagnostics.push_back(diag);
  }

  result.lf = std::move(estimate);
  result.mask = used;
  return result;
}

inline DeblurResult rl_deblur(const LightField& observed, const Velocity6& v, const RLConfig& rl,
                              const RegConfig& reg, const ValidityMask& mask,
                              const DeblurOptions& opts = {}) {
  if (!v.finite()) throw ConfigError("velocity must be finite");
  rl.validate();
  return rl_deblur(observed, discretize(v, rl.n_steps), rl, reg, mask, opts);
}

inline void write_diagnostics_csv(const std::vector<IterationDiagnostics>& rows, std::ostream& out) {
  out << "iteration,log_likelihood,r_tv,r_ep,min,max,db\n";
  char buf[256];
  for (const auto& d : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.10g,%.10g,%.10g,%.10g,", d.iteration, d.log_likelihood,
                  d.r_tv, d.r_ep, d.min, d.max);
    out << buf;
    if (d.db) {
      if (std::isinf(*d.db)) {
        out << "inf";
      } else {
        std::snprintf(buf, sizeof buf, "%.10g", *d.db);
        out << buf;
      }
    }
    out << '\n';
  }
}

}  // namespace lfrl
