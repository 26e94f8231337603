#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "n2d3/core.hpp"
#include "n2d3/parallel.hpp"

namespace n2d3 {

// ---------------------------------------------------------------------------
// Gaussian color model: fixed linear map from RGB to the spectral measurement
// triple (E, E_lambda, E_lambdalambda) — intensity, yellow-blue opponent,
// red-green opponent.
// ---------------------------------------------------------------------------

inline constexpr std::array<std::array<double, 3>, 3> kGaussianColorMap = {{
    {0.06, 0.63, 0.27},
    {0.30, 0.04, -0.35},
    {0.34, -0.60, 0.17},
}};

struct SpectralPlanes {
  Plane e, el, ell;
};

inline SpectralPlanes rgb_to_gaussian(const RgbImage& img,
                                      int threads = thread_count()) {
  SpectralPlanes out{Plane(img.width, img.height), Plane(img.width, img.height),
                     Plane(img.width, img.height)};
  const auto& m = kGaussianColorMap;
  parallel_rows(
      img.height,
      [&](int y) {
        for (int x = 0; x < img.width; ++x) {
          const double r = img.at(x, y, 0), g = img.at(x, y, 1),
                       b = img.at(x, y, 2);
          out.e.at(x, y) = m[0][0] * r + m[0][1] * g + m[0][2] * b;
          out.el.at(x, y) = m[1][0] * r + m[1][1] * g + m[1][2] * b;
          out.ell.at(x, y) = m[2][0] * r + m[2][1] * g + m[2][2] * b;
        }
      },
      threads);
  return out;
}

// ---------------------------------------------------------------------------
// Separable Gaussian-derivative filtering.
//
// Kernels are sampled at integer taps and truncated at radius ceil(4*sigma).
// The smoothing kernel is renormalized to unit sum; the derivative kernel is
// stored as its strictly-positive-u half (antisymmetry is structural) and
// renormalized to unit first moment so a unit ramp maps to exactly 1.
// Borders use mirror (reflect-without-edge-repeat) indexing.
// ---------------------------------------------------------------------------

enum class Axis { kX, kY };

struct GaussianKernels {
  int radius = 0;
  std::vector<double> smooth;  // [0..radius], symmetric half incl. center
  std::vector<double> deriv;   // [1..radius] stored at index u-1, tap at -u
};

inline GaussianKernels gaussian_kernels(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be > 0");
  GaussianKernels k;
  k.radius = static_cast<int>(std::ceil(4.0 * sigma));
  const double s2 = sigma * sigma;
  k.smooth.resize(static_cast<size_t>(k.radius) + 1);
  k.deriv.resize(static_cast<size_t>(k.radius));
  for (int u = 0; u <= k.radius; ++u)
    k.smooth[static_cast<size_t>(u)] = std::exp(-0.5 * u * u / s2);
  double ssum = k.smooth[0];
  for (int u = 1; u <= k.radius; ++u) ssum += 2.0 * k.smooth[static_cast<size_t>(u)];
  for (auto& c : k.smooth) c /= ssum;
  // g'(u) sampled at the negative-u tap is positive; store the tap value at
  // +u (negative) and normalize so the ramp response Σ d(u)·(-2u) equals 1.
  double moment = 0.0;
  for (int u = 1; u <= k.radius; ++u) {
    const double d = -(u / s2) * std::exp(-0.5 * u * u / s2);
    k.deriv[static_cast<size_t>(u) - 1] = d;
    moment += -2.0 * u * d;
  }
  for (auto& c : k.deriv) c /= moment;
  return k;
}

namespace detail {

// reflect-101 fold: ... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...
inline int mirror(int i, int n) {
  if (n == 1) return 0;
  const int p = 2 * n - 2;
  i %= p;
  if (i < 0) i += p;
  return i < n ? i : p - i;
}

// smoothing pass: symmetric pairs keep horizontal-flip symmetry bit-exact
inline void smooth_pass(const Plane& in, Plane& out, const GaussianKernels& k,
                        Axis axis, int threads) {
  const int w = in.width, h = in.height;
  parallel_rows(
      h,
      [&](int y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          if (axis == Axis::kX) {
            acc = k.smooth[0] * in.at(x, y);
            for (int u = 1; u <= k.radius; ++u)
              acc += k.smooth[static_cast<size_t>(u)] *
                     (in.at(mirror(x - u, w), y) + in.at(mirror(x + u, w), y));
          } else {
            acc = k.smooth[0] * in.at(x, y);
            for (int u = 1; u <= k.radius; ++u)
              acc += k.smooth[static_cast<size_t>(u)] *
                     (in.at(x, mirror(y - u, h)) + in.at(x, mirror(y + u, h)));
          }
          out.at(x, y) = acc;
        }
      },
      threads);
}

// derivative pass: antisymmetric pairs make flip anti-symmetry bit-exact
inline void deriv_pass(const Plane& in, Plane& out, const GaussianKernels& k,
                       Axis axis, int threads) {
  const int w = in.width, h = in.height;
  parallel_rows(
      h,
      [&](int y) {
        for (int x = 0; x < w; ++x) {
          double acc = 0.0;
          if (axis == Axis::kX) {
            for (int u = 1; u <= k.radius; ++u)
              acc += k.deriv[static_cast<size_t>(u) - 1] *
                     (in.at(mirror(x - u, w), y) - in.at(mirror(x + u, w), y));
          } else {
            for (int u = 1; u <= k.radius; ++u)
              acc += k.deriv[static_cast<size_t>(u) - 1] *
                     (in.at(x, mirror(y - u, h)) - in.at(x, mirror(y + u, h)));
          }
          out.at(x, y) = acc;
        }
      },
      threads);
}

}  // namespace detail

// First spatial derivative at scale sigma along `axis`, Gaussian-smoothed at
// the same scale along the orthogonal axis.
inline Plane gaussian_derivative(const Plane& in, Axis axis, double sigma,
                                 int threads = thread_count()) {
  const GaussianKernels k = gaussian_kernels(sigma);
  Plane tmp(in.width, in.height), out(in.width, in.height);
  if (axis == Axis::kX) {
    detail::deriv_pass(in, tmp, k, Axis::kX, threads);
    detail::smooth_pass(tmp, out, k, Axis::kY, threads);
  } else {
    detail::deriv_pass(in, tmp, k, Axis::kY, threads);
    detail::smooth_pass(tmp, out, k, Axis::kX, threads);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chromatic color invariant.
//
//   N_lx  = (E_lx·E − E_l·E_x) / max(E,eps)^2
//   N_llx = (E_llx·E^2 − E_ll·E_x·E − 2·E_lx·E_l·E + 2·E_l^2·E_x) / max(E,eps)^3
//
// and the y-axis twins. Numerators keep the raw E so the material-term
// cancellation is preserved wherever the guard is inactive.
// ---------------------------------------------------------------------------

struct InvariantComponents {
  Plane nlx, nllx, nly, nlly;
};

inline InvariantComponents invariant_components(const SpectralPlanes& sp,
                                                double sigma, double eps,
                                                int threads = thread_count()) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (!sp.e.same_shape(sp.el) || !sp.e.same_shape(sp.ell))
    throw std::invalid_argument("invariant_components: shape mismatch");
  const int w = sp.e.width, h = sp.e.height;
  const Plane ex = gaussian_derivative(sp.e, Axis::kX, sigma, threads);
  const Plane ey = gaussian_derivative(sp.e, Axis::kY, sigma, threads);
  const Plane elx = gaussian_derivative(sp.el, Axis::kX, sigma, threads);
  const Plane ely = gaussian_derivative(sp.el, Axis::kY, sigma, threads);
  const Plane ellx = gaussian_derivative(sp.ell, Axis::kX, sigma, threads);
  const Plane elly = gaussian_derivative(sp.ell, Axis::kY, sigma, threads);

  InvariantComponents out{Plane(w, h), Plane(w, h), Plane(w, h), Plane(w, h)};
  parallel_rows(
      h,
      [&](int y) {
        for (int x = 0; x < w; ++x) {
          const double e = sp.e.at(x, y);
          const double el = sp.el.at(x, y);
          const double ell = sp.ell.at(x, y);
          const double d = std::max(e, eps);
          const double d2 = d * d;
          const double d3 = d2 * d;
          const double dx = ex.at(x, y), dy = ey.at(x, y);
          const double dlx = elx.at(x, y), dly = ely.at(x, y);
          const double dllx = ellx.at(x, y), dlly = elly.at(x, y);
          out.nlx.at(x, y) = (dlx * e - el * dx) / d2;
          out.nly.at(x, y) = (dly * e - el * dy) / d2;
          out.nllx.at(x, y) = (dllx * e * e - ell * dx * e -
                               2.0 * dlx * el * e + 2.0 * el * el * dx) /
                              d3;
          out.nlly.at(x, y) = (dlly * e * e - ell * dy * e -
                               2.0 * dly * el * e + 2.0 * el * el * dy) /
                              d3;
        }
      },
      threads);
  return out;
}

inline Plane combine_invariant(const InvariantComponents& c,
                               int threads = thread_count()) {
  Plane n(c.nlx.width, c.nlx.height);
  parallel_rows(
      c.nlx.height,
      [&](int y) {
        for (int x = 0; x < c.nlx.width; ++x) {
          const double a = c.nlx.at(x, y), b = c.nllx.at(x, y),
                       p = c.nly.at(x, y), q = c.nlly.at(x, y);
          n.at(x, y) = std::sqrt(a * a + b * b + p * p + q * q);
        }
      },
      threads);
  return n;
}

}  // namespace n2d3
