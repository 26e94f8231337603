#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "n2d3/core.hpp"
#include "n2d3/rng.hpp"
#include "n2d3/sinkhorn.hpp"

namespace n2d3 {

// Per-layer feature map on a coarse grid; vectors interleaved row-major.
struct FeatureGrid {
  int layer_id = 0;
  int gh = 0, gw = 0, dim = 0;
  std::vector<double> data;  // (y*gw + x)*dim + c

  size_t cell(int x, int y) const {
    return (static_cast<size_t>(y) * static_cast<size_t>(gw) +
            static_cast<size_t>(x)) *
           static_cast<size_t>(dim);
  }
};

inline FeatureGrid feature_grid_from(const std::vector<uint32_t>& dims,
                                     const std::vector<float>& data,
                                     int layer_id) {
  if (dims.size() != 3)
    throw std::invalid_argument("feature grid tensor must be rank 3");
  FeatureGrid g;
  g.layer_id = layer_id;
  g.gh = static_cast<int>(dims[0]);
  g.gw = static_cast<int>(dims[1]);
  g.dim = static_cast<int>(dims[2]);
  if (g.gh < 1 || g.gw < 1 || g.dim < 1)
    throw std::invalid_argument("feature grid tensor has a zero dimension");
  g.data.assign(data.begin(), data.end());
  return g;
}

// Majority label per grid cell; ties break toward the globally rarer region,
// then toward the smaller label value.
inline LabelImage downsample_labels(const LabelImage& full, int gh, int gw) {
  if (gh < 1 || gw < 1 || gh > full.height || gw > full.width)
    throw std::invalid_argument("downsample_labels: bad grid size");
  std::array<size_t, 4> global{};
  for (uint8_t l : full.labels) {
    if (l > 3) throw std::invalid_argument("downsample_labels: label > 3");
    ++global[l];
  }
  LabelImage out(gw, gh);
  for (int gy = 0; gy < gh; ++gy) {
    const int y0 = static_cast<int>(static_cast<long long>(full.height) * gy / gh);
    const int y1 =
        static_cast<int>(static_cast<long long>(full.height) * (gy + 1) / gh);
    for (int gx = 0; gx < gw; ++gx) {
      const int x0 = static_cast<int>(static_cast<long long>(full.width) * gx / gw);
      const int x1 =
          static_cast<int>(static_cast<long long>(full.width) * (gx + 1) / gw);
      std::array<size_t, 4> cnt{};
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) ++cnt[full.at(x, y)];
      int best = 0;
      for (int l = 1; l < 4; ++l) {
        if (cnt[l] > cnt[best] ||
            (cnt[l] == cnt[best] && cnt[l] > 0 &&
             (global[l] < global[best] ||
              (global[l] == global[best] && l < best))))
          best = l;
      }
      out.at(gx, gy) = static_cast<uint8_t>(best);
    }
  }
  return out;
}

// One region's sample: the same K locations serve as anchors (generated grid)
// and, cross-indexed, as each other's negatives (source grid). Anchor i's
// positive is the source feature at its own location; its negatives are the
// source features at the other K-1 locations, so a singleton region yields an
// anchor with no negatives at all.
struct RegionPatchSet {
  std::vector<int> cells;        // chosen row-major grid indices
  std::vector<double> anchors;   // k * dim, from the generated grid
  std::vector<double> positives; // k * dim, from the source grid

  int k() const { return static_cast<int>(cells.size()); }
};

struct PatchSampleSet {
  int layer_id = 0;
  int dim = 0, gh = 0, gw = 0;
  std::array<RegionPatchSet, 4> regions;
};

inline PatchSampleSet sample_patches(const FeatureGrid& src,
                                     const FeatureGrid& gen,
                                     const LabelImage& labels, uint64_t seed,
                                     int max_per_region = 256) {
  if (src.gh != gen.gh || src.gw != gen.gw || src.dim != gen.dim)
    throw std::invalid_argument("sample_patches: grid shape mismatch");
  if (max_per_region < 1)
    throw std::invalid_argument("sample_patches: max_per_region < 1");
  const LabelImage grid_labels =
      (labels.width == src.gw && labels.height == src.gh)
          ? labels
          : downsample_labels(labels, src.gh, src.gw);

  PatchSampleSet out;
  out.layer_id = src.layer_id;
  out.dim = src.dim;
  out.gh = src.gh;
  out.gw = src.gw;
  Rng rng(seed);
  for (int r = 0; r < 4; ++r) {
    std::vector<int> cand;
    for (size_t i = 0; i < grid_labels.labels.size(); ++i)
      if (grid_labels.labels[i] == r) cand.push_back(static_cast<int>(i));
    const size_t k = std::min(cand.size(), static_cast<size_t>(max_per_region));
    if (k > 0) rng.partial_shuffle(cand, k);
    RegionPatchSet& reg = out.regions[static_cast<size_t>(r)];
    reg.cells.assign(cand.begin(), cand.begin() + static_cast<long>(k));
    reg.anchors.resize(k * static_cast<size_t>(src.dim));
    reg.positives.resize(k * static_cast<size_t>(src.dim));
    for (size_t i = 0; i < k; ++i) {
      const size_t off = static_cast<size_t>(reg.cells[i]) *
                         static_cast<size_t>(src.dim);
      for (int c = 0; c < src.dim; ++c) {
        reg.anchors[i * static_cast<size_t>(src.dim) + static_cast<size_t>(c)] =
            gen.data[off + static_cast<size_t>(c)];
        reg.positives[i * static_cast<size_t>(src.dim) +
                      static_cast<size_t>(c)] =
            src.data[off + static_cast<size_t>(c)];
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Losses.
// ---------------------------------------------------------------------------

// -log[ exp(p) / (exp(p) + sum_n w_n exp(q_n)) ], evaluated in the log domain
// so extreme similarity scales cannot overflow. Unit weights recover the
// plain InfoNCE value; an empty negative set is the guarded positive-only
// case with loss exactly 0.
inline double weighted_nce(const std::vector<double>& v,
                           const std::vector<double>& vpos,
                           const std::vector<std::vector<double>>& negatives,
                           const std::vector<double>& weights, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("weighted_nce: tau <= 0");
  if (v.size() != vpos.size() || v.empty())
    throw std::invalid_argument("weighted_nce: bad vector sizes");
  if (negatives.size() != weights.size())
    throw std::invalid_argument("weighted_nce: negatives/weights mismatch");
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  const double p = dot(v, vpos) / tau;
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  terms.reserve(weights.size());
  for (size_t n = 0; n < weights.size(); ++n) {
    if (!(weights[n] >= 0.0))
      throw std::invalid_argument("weighted_nce: negative weight");
    if (weights[n] == 0.0) continue;
    if (negatives[n].size() != v.size())
      throw std::invalid_argument("weighted_nce: negative dim mismatch");
    const double t = std::log(weights[n]) + dot(v, negatives[n]) / tau;
    terms.push_back(t);
    m = std::max(m, t);
  }
  if (terms.empty()) return 0.0;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  const double lse_neg = m + std::log(s);
  // log(e^p + e^lse_neg) - p, stably
  if (lse_neg <= p) return std::log1p(std::exp(lse_neg - p));
  return (lse_neg - p) + std::log1p(std::exp(p - lse_neg));
}

struct DegNceResult {
  std::vector<double> per_layer;
  std::vector<std::array<int, 4>> region_counts;  // sampled K per layer/region
  double total = 0.0;
};

// Sum over layers of the per-layer anchor mean. plans[l][r] must match the
// sampled K of layer l, region r whenever that region has at least two
// cells; singleton or empty regions take no plan.
inline DegNceResult deg_nce_loss(
    const std::vector<PatchSampleSet>& layers,
    const std::vector<std::array<TransportPlan, 4>>& plans, double tau) {
  if (layers.size() != plans.size())
    throw std::invalid_argument("deg_nce_loss: layers/plans mismatch");
  DegNceResult out;
  out.per_layer.resize(layers.size(), 0.0);
  out.region_counts.assign(layers.size(), {0, 0, 0, 0});
  for (size_t l = 0; l < layers.size(); ++l) {
    const PatchSampleSet& ps = layers[l];
    double sum = 0.0;
    size_t anchors = 0;
    for (int r = 0; r < 4; ++r) {
      const RegionPatchSet& reg = ps.regions[static_cast<size_t>(r)];
      const int k = reg.k();
      out.region_counts[l][static_cast<size_t>(r)] = k;
      anchors += static_cast<size_t>(k);
      if (k < 2) continue;
      const TransportPlan& plan = plans[l][static_cast<size_t>(r)];
      if (plan.k != k)
        throw std::invalid_argument("deg_nce_loss: plan size mismatch");
      const int d = ps.dim;
      for (int i = 0; i < k; ++i) {
        std::vector<double> v(reg.anchors.begin() + i * d,
                              reg.anchors.begin() + (i + 1) * d);
        std::vector<double> vp(reg.positives.begin() + i * d,
                               reg.positives.begin() + (i + 1) * d);
        std::vector<std::vector<double>> negs;
        std::vector<double> w;
        negs.reserve(static_cast<size_t>(k) - 1);
        w.reserve(static_cast<size_t>(k) - 1);
        for (int j = 0; j < k; ++j) {
          if (j == i) continue;
          negs.emplace_back(reg.positives.begin() + j * d,
                            reg.positives.begin() + (j + 1) * d);
          w.push_back(plan.at(i, j));
        }
        sum += weighted_nce(v, vp, negs, w, tau);
      }
    }
    out.per_layer[l] = anchors > 0 ? sum / static_cast<double>(anchors) : 0.0;
    out.total += out.per_layer[l];
  }
  return out;
}

struct AdvLosses {
  double loss_f = 0.0;  // generator-side least-squares term
  double loss_d = 0.0;  // discriminator-side
};

// Least-squares adversarial pair:
//   L_F = mean (d_fake - 1)^2
//   L_D = mean (d_real - 1)^2 + mean (d_fake)^2
inline AdvLosses adversarial_losses(const std::vector<double>& d_real,
                                    const std::vector<double>& d_fake) {
  if (d_real.empty() || d_fake.empty())
    throw std::invalid_argument("adversarial_losses: empty input");
  AdvLosses out;
  double sf = 0.0, sr = 0.0, sq = 0.0;
  for (double d : d_fake) {
    sf += (d - 1.0) * (d - 1.0);
    sq += d * d;
  }
  for (double d : d_real) sr += (d - 1.0) * (d - 1.0);
  out.loss_f = sf / static_cast<double>(d_fake.size());
  out.loss_d = sr / static_cast<double>(d_real.size()) +
               sq / static_cast<double>(d_fake.size());
  return out;
}

// Assembled totals: the generator objective adds DegNCE to its adversarial
// term; the discriminator objective is its adversarial term alone.
struct LossReport {
  std::vector<double> per_layer;
  double deg_nce = 0.0;
  double adv_f = 0.0;
  double adv_d = 0.0;
  bool has_adv = false;

  double total_f() const { return has_adv ? adv_f + deg_nce : deg_nce; }
  double total_d() const { return adv_d; }
};

}  // namespace n2d3
