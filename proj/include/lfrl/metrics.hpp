#pragma once

// Error and quality measures. All reductions run serially in index order.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "lfrl/light_field.hpp"
#include "lfrl/renderer.hpp"

namespace lfrl {

inline constexpr double kLikelihoodFloor = 1e-12;

// Half-open pixel rectangle [u0, u1) x [v0, v1) inside view (is, it).
struct PatchSpec {
  std::size_t is = 0;
  std::size_t it = 0;
  std::size_t u0 = 0, v0 = 0, u1 = 0, v1 = 0;

  std::string label() const {
    return std::to_string(is) + ":" + std::to_string(it) + ":" + std::to_string(u0) + ":" +
           std::to_string(v0) + ":" + std::to_string(u1) + ":" + std::to_string(v1);
  }
};

inline void check_patch(const Image& img, const PatchSpec& p) {
  if (!(p.u1 > p.u0 && p.v1 > p.v0 && p.u1 <= img.nu && p.v1 <= img.nv)) {
    throw std::out_of_range("patch " + p.label() + " outside " + std::to_string(img.nu) + "x" +
                            std::to_string(img.nv) + " image");
  }
}

inline double rmse(std::span<const double> test, std::span<const double> truth) {
  if (test.size() != truth.size()) throw ShapeError("rmse operands differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const double e = test[i] - truth[i];
    sum += e * e;
  }
  return test.empty() ? 0.0 : std::sqrt(sum / static_cast<double>(test.size()));
}

// -20 log10(RMSE) for a peak of 1; +inf when the inputs are identical.
inline double db_from_rmse(double r) {
  if (r == 0.0) return std::numeric_limits<double>::infinity();
  return -20.0 * std::log10(r);
}

inline double db_error(const Image& test, const Image& truth) {
  if (!test.same_shape(truth)) throw ShapeError("db_error image shapes differ");
  return db_from_rmse(rmse(test.data, truth.data));
}

// Pooled over channels; only rays set in `mask` count when one is given.
inline double db_error(const LightField& test, const LightField& truth, const ValidityMask* mask = nullptr) {
  if (!test.same_shape(truth)) throw ShapeError("db_error light field shapes differ");
  if (!mask) return db_from_rmse(rmse(test.data(), truth.data()));
  if (!mask->matches(test.dims())) throw ShapeError("db_error mask shape differs");
  const std::size_t nc = test.dims().nc;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t ray = 0; ray < mask->size(); ++ray) {
    if (!(*mask)[ray]) continue;
    for (std::size_t c = 0; c < nc; ++c) {
      const double e = test.data()[ray * nc + c] - truth.data()[ray * nc + c];
      sum += e * e;
      ++n;
    }
  }
  return db_from_rmse(n ? std::sqrt(sum / static_cast<double>(n)) : 0.0);
}

inline double central_db(const LightField& test, const LightField& truth) {
  return db_error(central_view(test), central_view(truth));
}

// Mean squared horizontal first difference (I[u+1,v] - I[u,v])^2 over pairs
// inside the patch, pooled over channels.
inline double edge_energy(const Image& img, const PatchSpec& p) {
  check_patch(img, p);
  if (p.u1 - p.u0 < 2) throw std::out_of_range("edge_energy needs a patch at least 2 pixels wide");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t u = p.u0; u + 1 < p.u1; ++u)
    for (std::size_t v = p.v0; v < p.v1; ++v)
      for (std::size_t c = 0; c < img.nc; ++c) {
        const double d = img(u + 1, v, c) - img(u, v, c);
        sum += d * d;
        ++n;
      }
  return sum / static_cast<double>(n);
}

// Population standard deviation over the patch, pooled over channels.
inline double noise_std(const Image& img, const PatchSpec& p) {
  check_patch(img, p);
  double mean = 0.0;
  std::size_t n = 0;
  for (std::size_t u = p.u0; u < p.u1; ++u)
    for (std::size_t v = p.v0; v < p.v1; ++v)
      for (std::size_t c = 0; c < img.nc; ++c) {
        mean += img(u, v, c);
        ++n;
      }
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t u = p.u0; u < p.u1; ++u)
    for (std::size_t v = p.v0; v < p.v1; ++v)
      for (std::size_t c = 0; c < img.nc; ++c) {
        const double d = img(u, v, c) - mean;
        var += d * d;
      }
  return std::sqrt(var / static_cast<double>(n));
}

inline double edge_energy(const LightField& lf, const PatchSpec& p) { return edge_energy(view(lf, p.is, p.it), p); }
inline double noise_std(const LightField& lf, const PatchSpec& p) { return noise_std(view(lf, p.is, p.it), p); }

// Poisson log-likelihood without the constant log(B!) term.
inline double poisson_loglik(std::span<const double> observed, std::span<const double> model,
                             const ValidityMask* mask = nullptr, std::size_t channels = 1) {
  if (observed.size() != model.size()) throw ShapeError("poisson_loglik operands differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (mask && !(*mask)[i / channels]) continue;
    sum += observed[i] * std::log(std::max(model[i], kLikelihoodFloor)) - model[i];
  }
  return sum;
}

inline double poisson_loglik(const LightField& observed, const BlurResult& model) {
  if (!observed.same_shape(model.lf) || !model.mask.matches(observed.dims())) {
    throw ShapeError("poisson_loglik shapes differ");
  }
  return poisson_loglik(observed.data(), model.lf.data(), &model.mask, observed.dims().nc);
}

inline double poisson_loglik(const Image& observed, const Image& model) {
  if (!observed.same_shape(model)) throw ShapeError("poisson_loglik image shapes differ");
  return poisson_loglik(observed.data, model.data);
}

// Largest sample, so callers can flag intensities above the nominal peak.
inline double max_value(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  return m;
}

struct MetricRow {
  std::string image;
  std::string metric;
  std::string patch;
  double value;
};

inline void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out) {
  out << "image,metric,patch,value\n";
  for (const auto& r : rows) {
    out << r.image << ',' << r.metric << ',' << r.patch << ',';
    if (std::isinf(r.value)) {
      out << (r.value > 0 ? "inf" : "-inf");
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.10g", r.value);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace lfrl
