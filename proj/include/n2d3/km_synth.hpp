#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "n2d3/core.hpp"
#include "n2d3/parallel.hpp"
#include "n2d3/photometric.hpp"

namespace n2d3 {

// ---------------------------------------------------------------------------
// Scene model. All geometry lives in normalized [0,1]^2 coordinates (per
// axis), so the same scene renders at any resolution — grid refinement for
// the corollary check just re-renders with doubled width/height.
// ---------------------------------------------------------------------------

struct SpectralCurve {
  enum class Kind { kFlat, kGauss, kRamp };
  Kind kind = Kind::kFlat;
  double a = 1.0;       // flat: value; gauss: peak; ramp: value at lambda_min
  double b = 0.0;       // gauss: floor;              ramp: value at lambda_max
  double center = 550;  // gauss, nm
  double width = 50;    // gauss, nm

  double eval(double lam, double lmin, double lmax) const {
    switch (kind) {
      case Kind::kFlat:
        return a;
      case Kind::kGauss: {
        const double d = (lam - center) / width;
        return b + (a - b) * std::exp(-0.5 * d * d);
      }
      case Kind::kRamp:
        return a + (b - a) * (lam - lmin) / (lmax - lmin);
    }
    return 0.0;
  }
};

namespace detail {
inline double edge(double t, double w) {
  // sigmoid of width w; w == 0 degenerates to a hard step (>= 0 maps to 1)
  if (w <= 0.0) return t >= 0.0 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-t / w));
}
}  // namespace detail

// Region footprint with optional sigmoid edges; alpha() in [0,1].
struct Coverage {
  enum class Shape { kAll, kHStep, kVStep, kRect, kDisc, kRing };
  Shape shape = Shape::kAll;
  double x0 = 0, y0 = 0, x1 = 1, y1 = 1;  // rect, step positions
  double cx = 0.5, cy = 0.5;
  double r = 0.25, r0 = 0, r1 = 0.5;
  double width = 0;  // transition width; 0 = hard

  double alpha(double x, double y) const {
    using detail::edge;
    switch (shape) {
      case Shape::kAll:
        return 1.0;
      case Shape::kHStep:
        return edge(x - x0, width);
      case Shape::kVStep:
        return edge(y - y0, width);
      case Shape::kRect:
        return edge(x - x0, width) * edge(x1 - x, width) *
               edge(y - y0, width) * edge(y1 - y, width);
      case Shape::kDisc: {
        const double d = std::hypot(x - cx, y - cy);
        return edge(r - d, width);
      }
      case Shape::kRing: {
        const double d = std::hypot(x - cx, y - cy);
        return edge(d - r0, width) * edge(r1 - d, width);
      }
    }
    return 0.0;
  }
};

struct Material {
  std::string name;
  double scale = 1.0;        // the per-material coefficient c_m
  SpectralCurve curve;       // optional own curve
  bool has_curve = false;    // false -> scene-shared reflectance curve
};

struct RegionPaint {
  Coverage cov;
  int material = 0;
};

struct RhoPaint {
  Coverage cov;
  double value = 0.0;  // Fresnel coefficient painted in
};

struct GtPaint {
  Coverage cov;  // thresholded at alpha >= 0.5
  uint8_t label = 0;
};

// Illumination component: separable profile x spectrum, tagged with the
// scene-pair variants it belongs to.
struct Profile {
  enum class Kind { kUniform, kRampX, kRampY, kStepX, kBlob, kDisc, kRing };
  Kind kind = Kind::kUniform;
  double v0 = 1.0, v1 = 1.0;            // uniform, ramps, step levels
  double x0 = 0.5, width = 0.0;         // step
  double cx = 0.5, cy = 0.5;            // blob/disc/ring center
  double s = 0.1, r = 0.2, peak = 1.0;  // spread / radius / amplitude

  double eval(double x, double y) const {
    using detail::edge;
    switch (kind) {
      case Kind::kUniform:
        return v0;
      case Kind::kRampX:
        return v0 + (v1 - v0) * x;
      case Kind::kRampY:
        return v0 + (v1 - v0) * y;
      case Kind::kStepX:
        return v0 + (v1 - v0) * edge(x - x0, width);
      case Kind::kBlob: {
        const double dx = x - cx, dy = y - cy;
        return peak * std::exp(-(dx * dx + dy * dy) / (2.0 * s * s));
      }
      case Kind::kDisc: {
        const double d = std::hypot(x - cx, y - cy);
        return peak * edge(r - d, width);
      }
      case Kind::kRing: {
        const double d = std::hypot(x - cx, y - cy);
        const double t = (d - r) / s;
        return peak * std::exp(-0.5 * t * t);
      }
    }
    return 0.0;
  }
};

enum class Variant : int { kA = 1, kB = 2 };
inline constexpr int kVariantA = 1;
inline constexpr int kVariantB = 2;

struct IllumComponent {
  int variants = kVariantA | kVariantB;
  Profile profile;
  SpectralCurve spectrum;
};

enum class RenderMode { kEq1, kEq3 };

struct SceneSpec {
  int width = 128, height = 128;
  double lambda_min = 400.0, lambda_max = 700.0;
  int lambda_samples = 31;
  RenderMode mode = RenderMode::kEq1;
  SpectralCurve reflectance;  // shared R(lambda), default flat 1
  std::vector<Material> materials;
  int background = -1;
  std::vector<RegionPaint> regions;
  double texture_amp = 0.0;   // material micro-texture: spatially oscillating
  double texture_freq = 0.0;  // spectral tilt, cycles per unit x
  std::vector<RhoPaint> rho;
  std::vector<IllumComponent> illum;
  std::vector<GtPaint> gt;
};

// Dense spectral radiance cube.
struct SpectralField {
  int width = 0, height = 0, samples = 0;
  double lambda_min = 0, lambda_max = 0;
  std::vector<double> radiance;  // (y * width + x) * samples + s

  double at(int x, int y, int s) const {
    return radiance[(static_cast<size_t>(y) * static_cast<size_t>(width) +
                     static_cast<size_t>(x)) *
                        static_cast<size_t>(samples) +
                    static_cast<size_t>(s)];
  }
  double lambda(int s) const {
    return lambda_min + (lambda_max - lambda_min) * s / (samples - 1);
  }
};

// ---------------------------------------------------------------------------
// Renderer.
//
// Eq1 mode:  E = e·(1-rho)^2·refl + e·rho          (full dichromatic form)
// Eq3 mode:  E = e where rho >= 0.5, e·refl elsewhere (idealized split)
//
// refl(lambda, x) = sum_m w_m(x)·c_m·R_m(lambda), optionally modulated by the
// micro-texture (1 + amp·sin(2*pi*freq*x)·tilt(lambda)). Rejects reflectance
// outside [0,1] and negative illumination.
// ---------------------------------------------------------------------------

inline SpectralField render_spectral(const SceneSpec& sc, Variant variant,
                                     int width, int height,
                                     int threads = thread_count()) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("render_spectral: empty size");
  if (sc.lambda_samples < 16)
    throw Error("render_spectral: need at least 16 wavelength samples");
  if (!(sc.lambda_max > sc.lambda_min))
    throw Error("render_spectral: bad wavelength range");
  if (sc.materials.empty())
    throw Error("render_spectral: no materials");
  if (sc.background < 0 ||
      sc.background >= static_cast<int>(sc.materials.size()))
    throw Error("render_spectral: background material not set");

  const int S = sc.lambda_samples;
  SpectralField f;
  f.width = width;
  f.height = height;
  f.samples = S;
  f.lambda_min = sc.lambda_min;
  f.lambda_max = sc.lambda_max;
  f.radiance.assign(static_cast<size_t>(width) * static_cast<size_t>(height) *
                        static_cast<size_t>(S),
                    0.0);

  // per-material spectral samples (curve * scale), shared across pixels
  const size_t nm = sc.materials.size();
  std::vector<double> mat_spec(nm * static_cast<size_t>(S));
  std::vector<double> tilt(static_cast<size_t>(S));
  const double lmid = 0.5 * (sc.lambda_min + sc.lambda_max);
  for (int s = 0; s < S; ++s) {
    const double lam = f.lambda(s);
    tilt[static_cast<size_t>(s)] =
        (lam - lmid) / (sc.lambda_max - sc.lambda_min);
    for (size_t m = 0; m < nm; ++m) {
      const Material& mat = sc.materials[m];
      const SpectralCurve& cur = mat.has_curve ? mat.curve : sc.reflectance;
      mat_spec[m * static_cast<size_t>(S) + static_cast<size_t>(s)] =
          mat.scale * cur.eval(lam, sc.lambda_min, sc.lambda_max);
    }
  }
  const int vbit = static_cast<int>(variant);
  const double kTwoPi = 6.283185307179586476925286766559;

  std::vector<uint8_t> fail(static_cast<size_t>(height), 0);
  parallel_rows(
      height,
      [&](int j) {
        std::vector<double> w(nm);
        const double y = (j + 0.5) / height;
        for (int i = 0; i < width; ++i) {
          const double x = (i + 0.5) / width;
          // material weights
          for (size_t m = 0; m < nm; ++m) w[m] = 0.0;
          w[static_cast<size_t>(sc.background)] = 1.0;
          for (const RegionPaint& rp : sc.regions) {
            const double a = rp.cov.alpha(x, y);
            for (size_t m = 0; m < nm; ++m) w[m] *= (1.0 - a);
            w[static_cast<size_t>(rp.material)] += a;
          }
          // Fresnel field
          double rho = 0.0;
          for (const RhoPaint& rp : sc.rho) {
            const double a = rp.cov.alpha(x, y);
            rho = (1.0 - a) * rho + a * rp.value;
          }
          const double tex =
              sc.texture_amp != 0.0
                  ? sc.texture_amp * std::sin(kTwoPi * sc.texture_freq * x)
                  : 0.0;
          const size_t base =
              (static_cast<size_t>(j) * static_cast<size_t>(width) +
               static_cast<size_t>(i)) *
              static_cast<size_t>(S);
          for (int s = 0; s < S; ++s) {
            double refl = 0.0;
            for (size_t m = 0; m < nm; ++m)
              refl += w[m] *
                      mat_spec[m * static_cast<size_t>(S) + static_cast<size_t>(s)];
            if (tex != 0.0) refl *= 1.0 + tex * tilt[static_cast<size_t>(s)];
            if (refl < -1e-12 || refl > 1.0 + 1e-12) {
              fail[static_cast<size_t>(j)] = 1;
              return;
            }
            double e = 0.0;
            const double lam = f.lambda(s);
            for (const IllumComponent& ic : sc.illum) {
              if ((ic.variants & vbit) == 0) continue;
              e += ic.profile.eval(x, y) *
                   ic.spectrum.eval(lam, sc.lambda_min, sc.lambda_max);
            }
            if (e < 0.0) {
              fail[static_cast<size_t>(j)] = 1;
              return;
            }
            double v;
            if (sc.mode == RenderMode::kEq3) {
              v = rho >= 0.5 ? e : e * refl;
            } else {
              const double t = 1.0 - rho;
              v = e * t * t * refl + e * rho;
            }
            f.radiance[base + static_cast<size_t>(s)] = v;
          }
        }
      },
      threads);
  for (uint8_t b : fail)
    if (b)
      throw Error(
          "render_spectral: reflectance outside [0,1] or negative "
          "illumination");
  return f;
}

// ---------------------------------------------------------------------------
// Sensor integration: three Gaussian bands (centers 610/550/470 nm, common
// std 45 nm), each discretized on the wavelength grid and normalized to unit
// sum, so spectrally flat radiance r maps to (r, r, r). The image is then
// globally rescaled only if its maximum exceeds 1.
// ---------------------------------------------------------------------------

inline constexpr std::array<double, 3> kBandCenters = {610.0, 550.0, 470.0};
inline constexpr double kBandSigma = 45.0;

inline RgbImage spectral_to_rgb(const SpectralField& f,
                                int threads = thread_count()) {
  const int S = f.samples;
  std::array<std::vector<double>, 3> bands;
  for (int c = 0; c < 3; ++c) {
    bands[static_cast<size_t>(c)].resize(static_cast<size_t>(S));
    double sum = 0.0;
    for (int s = 0; s < S; ++s) {
      const double d = (f.lambda(s) - kBandCenters[static_cast<size_t>(c)]) /
                       kBandSigma;
      sum += bands[static_cast<size_t>(c)][static_cast<size_t>(s)] =
          std::exp(-0.5 * d * d);
    }
    for (double& v : bands[static_cast<size_t>(c)]) v /= sum;
  }
  RgbImage img(f.width, f.height);
  parallel_rows(
      f.height,
      [&](int y) {
        for (int x = 0; x < f.width; ++x) {
          for (int c = 0; c < 3; ++c) {
            double acc = 0.0;
            for (int s = 0; s < S; ++s)
              acc += bands[static_cast<size_t>(c)][static_cast<size_t>(s)] *
                     f.at(x, y, s);
            img.at(x, y, c) = acc;
          }
        }
      },
      threads);
  double mx = 0.0;
  for (double v : img.rgb) mx = std::max(mx, v);
  if (mx > 1.0) {
    const double inv = 1.0 / mx;
    for (double& v : img.rgb) v *= inv;
  }
  return img;
}

// Ground-truth labels at an arbitrary resolution; later paints override.
inline LabelImage render_labels(const SceneSpec& sc, int width, int height) {
  LabelImage li(width, height,
                static_cast<uint8_t>(Region::kDarkness));
  for (int j = 0; j < height; ++j) {
    const double y = (j + 0.5) / height;
    for (int i = 0; i < width; ++i) {
      const double x = (i + 0.5) / width;
      uint8_t lab = static_cast<uint8_t>(Region::kDarkness);
      for (const GtPaint& g : sc.gt)
        if (g.cov.alpha(x, y) >= 0.5) lab = g.label;
      li.at(i, j) = lab;
    }
  }
  return li;
}

// ---------------------------------------------------------------------------
// Corollary-1 verification.
//
// Variant (a) has spatially uniform illumination color, so the continuum
// invariant over its material structure vanishes; variant (b) adds an
// illumination color gradient with genuinely coupled lambda-x structure.
// Responses are max |N| over the interior (kernel radius + 1 margin).
// With refine > 1 both variants are re-rendered at the finer grid to expose
// how the two responses scale with pixel pitch.
// ---------------------------------------------------------------------------

struct CorollaryReport {
  double material_response = 0.0;      // variant a, base grid
  double illumination_response = 0.0;  // variant b, base grid
  double ratio = 0.0;                  // material / illumination
  bool degenerate = false;             // illumination response below floor
  int refine = 1;
  double material_refined = 0.0;
  double illumination_refined = 0.0;
  double material_decrease = 0.0;      // base / refined
  double illumination_change = 0.0;    // |refined - base| / base
};

namespace detail {

inline double interior_max(const Plane& p, int margin) {
  double mx = 0.0;
  for (int y = margin; y < p.height - margin; ++y)
    for (int x = margin; x < p.width - margin; ++x)
      mx = std::max(mx, std::abs(p.at(x, y)));
  return mx;
}

inline double scene_response(const SceneSpec& sc, Variant v, int w, int h,
                             double sigma, double eps, int threads) {
  const SpectralField f = render_spectral(sc, v, w, h, threads);
  const RgbImage img = spectral_to_rgb(f, threads);
  const SpectralPlanes sp = rgb_to_gaussian(img, threads);
  const Plane n =
      combine_invariant(invariant_components(sp, sigma, eps, threads), threads);
  const int margin = static_cast<int>(std::ceil(4.0 * sigma)) + 1;
  return interior_max(n, margin);
}

}  // namespace detail

inline CorollaryReport verify_corollary1(const SceneSpec& sc, double sigma,
                                         double eps, int refine = 1,
                                         int threads = thread_count()) {
  if (refine < 1) throw std::invalid_argument("verify_corollary1: refine < 1");
  CorollaryReport rep;
  rep.material_response = detail::scene_response(sc, Variant::kA, sc.width,
                                                 sc.height, sigma, eps, threads);
  rep.illumination_response = detail::scene_response(
      sc, Variant::kB, sc.width, sc.height, sigma, eps, threads);
  rep.degenerate = rep.illumination_response < 1e-12;
  rep.ratio = rep.degenerate
                  ? 0.0
                  : rep.material_response / rep.illumination_response;
  rep.refine = refine;
  if (refine > 1) {
    rep.material_refined =
        detail::scene_response(sc, Variant::kA, sc.width * refine,
                               sc.height * refine, sigma, eps, threads);
    rep.illumination_refined =
        detail::scene_response(sc, Variant::kB, sc.width * refine,
                               sc.height * refine, sigma, eps, threads);
    rep.material_decrease = rep.material_refined > 0.0
                                ? rep.material_response / rep.material_refined
                                : 0.0;
    rep.illumination_change =
        rep.illumination_response > 0.0
            ? std::abs(rep.illumination_refined - rep.illumination_response) /
                  rep.illumination_response
            : 0.0;
  }
  return rep;
}

}  // namespace n2d3
