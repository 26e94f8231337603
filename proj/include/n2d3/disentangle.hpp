#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "n2d3/core.hpp"
#include "n2d3/kmeans.hpp"
#include "n2d3/parallel.hpp"
#include "n2d3/photometric.hpp"

namespace n2d3 {

// Illuminance proxy: per-pixel max of the three channels.
inline Plane illuminance(const RgbImage& img, int threads = thread_count()) {
  Plane l(img.width, img.height);
  parallel_rows(
      img.height,
      [&](int y) {
        for (int x = 0; x < img.width; ++x) {
          const double r = img.at(x, y, 0), g = img.at(x, y, 1),
                       b = img.at(x, y, 2);
          l.at(x, y) = std::max(r, std::max(g, b));
        }
      },
      threads);
  return l;
}

struct LightEffectExtraction {
  Mask light_effects;   // z > 0 pixels inside the well-lit mask
  Mask well_lit;        // well-lit mask with light effects carved out
  Plane soft_response;  // max(z, 0) over all pixels
};

// Standardizes the invariant plane over ALL pixels, rectifies, and carves the
// positive-response pixels out of the well-lit mask. A zero-variance plane
// yields an empty light-effect mask.
inline LightEffectExtraction extract_light_effects(const Plane& n,
                                                   const Mask& well_lit) {
  if (n.width != well_lit.width || n.height != well_lit.height)
    throw std::invalid_argument("extract_light_effects: shape mismatch");
  const size_t sz = n.size();
  double mean = 0.0;
  for (double x : n.v) mean += x;
  mean /= static_cast<double>(sz);
  double var = 0.0;
  for (double x : n.v) var += (x - mean) * (x - mean);
  var /= static_cast<double>(sz);
  // an exactly-constant plane has no variance even when the accumulated mean
  // rounds a hair off the constant; without this check the whole plane would
  // standardize to z = +/-1
  const auto [mn, mx] = std::minmax_element(n.v.begin(), n.v.end());
  const double sd = (*mn == *mx) ? 0.0 : std::sqrt(var);

  LightEffectExtraction out{Mask(n.width, n.height, 0),
                            Mask(n.width, n.height, 0),
                            Plane(n.width, n.height, 0.0)};
  for (size_t i = 0; i < sz; ++i) {
    double r = 0.0;
    if (sd > 0.0) {
      const double z = (n.v[i] - mean) / sd;
      r = z > 0.0 ? z : 0.0;
    }
    out.soft_response.v[i] = r;
    const bool le = r > 0.0 && well_lit.m[i] != 0;
    out.light_effects.m[i] = le ? 1 : 0;
    out.well_lit.m[i] = (well_lit.m[i] != 0 && !le) ? 1 : 0;
  }
  return out;
}

struct DisentanglementMap {
  int width = 0;
  int height = 0;
  LabelImage labels;  // Region values
  Mask darkness, well_lit, light_effects, high_light;
  std::array<double, 3> centroids{};  // darkness / well-lit / high-light
  Plane soft_light_effects;           // diagnostic, rectified z response
};

struct DisentangleParams {
  double sigma = 1.0;
  double eps = 1e-4;
  uint64_t seed = 0;
  int max_iters = 300;
  double tol = 1e-6;
};

// Full physics-driven decomposition: luminance k-means into darkness /
// well-lit / high-light, then the color invariant splits light effects out of
// the well-lit cluster.
inline DisentanglementMap disentangle(const RgbImage& img,
                                      const DisentangleParams& p = {},
                                      int threads = thread_count()) {
  const Plane l = illuminance(img, threads);
  const KmeansResult km = kmeans3(l.v, p.seed, p.max_iters, p.tol);

  Mask md(img.width, img.height, 0), mn(img.width, img.height, 0),
      mh(img.width, img.height, 0);
  for (size_t i = 0; i < km.labels.size(); ++i) {
    if (km.labels[i] == 0)
      md.m[i] = 1;
    else if (km.labels[i] == 1)
      mn.m[i] = 1;
    else
      mh.m[i] = 1;
  }

  const SpectralPlanes sp = rgb_to_gaussian(img, threads);
  const InvariantComponents ic =
      invariant_components(sp, p.sigma, p.eps, threads);
  const Plane n = combine_invariant(ic, threads);
  LightEffectExtraction le = extract_light_effects(n, mn);

  DisentanglementMap out;
  out.width = img.width;
  out.height = img.height;
  out.labels = LabelImage(img.width, img.height);
  out.darkness = std::move(md);
  out.well_lit = std::move(le.well_lit);
  out.light_effects = std::move(le.light_effects);
  out.high_light = std::move(mh);
  out.centroids = km.centroids;
  out.soft_light_effects = std::move(le.soft_response);
  for (size_t i = 0; i < out.labels.labels.size(); ++i) {
    uint8_t lab = static_cast<uint8_t>(Region::kDarkness);
    if (out.well_lit.m[i])
      lab = static_cast<uint8_t>(Region::kWellLit);
    else if (out.light_effects.m[i])
      lab = static_cast<uint8_t>(Region::kLightEffects);
    else if (out.high_light.m[i])
      lab = static_cast<uint8_t>(Region::kHighLight);
    out.labels.labels[i] = lab;
  }
  return out;
}

}  // namespace n2d3
