#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "n2d3/rng.hpp"

namespace n2d3 {

struct KmeansResult {
  std::array<double, 3> centroids{};      // ascending
  std::vector<uint8_t> labels;            // 0/1/2 by ascending centroid
  std::vector<double> objective_history;  // SSE after each assignment step
  int iterations = 0;
};

namespace detail {

// nearest-centroid index; ties go to the smaller centroid value, then the
// smaller index — this is what empties surplus duplicate clusters
inline int assign_one(double x, const std::array<double, 3>& c) {
  int best = 0;
  double bd = (x - c[0]) * (x - c[0]);
  for (int j = 1; j < 3; ++j) {
    const double d = (x - c[j]) * (x - c[j]);
    if (d < bd || (d == bd && (c[j] < c[best] ||
                               (c[j] == c[best] && j < best)))) {
      best = j;
      bd = d;
    }
  }
  return best;
}

}  // namespace detail

// Three-way 1-D k-means over luminance values. Seeding is k-means++ driven by
// the seeded generator; inputs with at most three distinct values bypass the
// random seeding entirely (centroids = sorted distinct values, padded by
// repeating the largest), so degenerate images are seed-independent.
inline KmeansResult kmeans3(const std::vector<double>& xs, uint64_t seed,
                            int max_iters = 300, double tol = 1e-6) {
  const size_t n = xs.size();
  if (n == 0) throw std::invalid_argument("kmeans3: empty input");
  if (max_iters < 1) throw std::invalid_argument("kmeans3: max_iters < 1");

  std::array<double, 3> c{};
  {
    std::set<double> distinct;
    for (double x : xs) {
      distinct.insert(x);
      if (distinct.size() > 3) break;
    }
    if (distinct.size() <= 3) {
      size_t i = 0;
      double last = 0.0;
      for (double v : distinct) c[i++] = last = v;
      for (; i < 3; ++i) c[i] = last;
      // every value sits exactly on a centroid; Lloyd refinement would only
      // smear the exact centroids with accumulation roundoff, so assign once
      // and return
      KmeansResult r;
      r.labels.resize(n);
      r.iterations = 1;
      double sse = 0.0;
      for (size_t i2 = 0; i2 < n; ++i2) {
        const int a = detail::assign_one(xs[i2], c);
        sse += (xs[i2] - c[a]) * (xs[i2] - c[a]);
        r.labels[i2] = static_cast<uint8_t>(a);
      }
      r.objective_history.push_back(sse);
      r.centroids = c;  // already ascending: std::set iterates in order
      return r;
    }
    {
      Rng rng(seed);
      c[0] = xs[static_cast<size_t>(rng.below(n))];
      std::vector<double> d2(n);
      for (int j = 1; j < 3; ++j) {
        double total = 0.0;
        size_t last_pos = 0;
        for (size_t i = 0; i < n; ++i) {
          double best = (xs[i] - c[0]) * (xs[i] - c[0]);
          for (int t = 1; t < j; ++t)
            best = std::min(best, (xs[i] - c[t]) * (xs[i] - c[t]));
          d2[i] = best;
          total += best;
          if (best > 0.0) last_pos = i;
        }
        const double u = rng.unit() * total;
        double run = 0.0;
        size_t pick = last_pos;  // guards the final rounding sliver
        for (size_t i = 0; i < n; ++i) {
          run += d2[i];
          if (u < run) {
            pick = i;
            break;
          }
        }
        c[j] = xs[pick];
      }
    }
  }

  KmeansResult r;
  r.labels.assign(n, 0);
  std::vector<uint8_t> prev(n, 255);
  for (int it = 0; it < max_iters; ++it) {
    ++r.iterations;
    double sse = 0.0;
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      const int a = detail::assign_one(xs[i], c);
      sse += (xs[i] - c[a]) * (xs[i] - c[a]);
      if (static_cast<uint8_t>(a) != prev[i]) changed = true;
      r.labels[i] = static_cast<uint8_t>(a);
    }
    r.objective_history.push_back(sse);
    if (!changed) break;
    prev = r.labels;

    std::array<double, 3> sum{};
    std::array<size_t, 3> cnt{};
    for (size_t i = 0; i < n; ++i) {
      sum[r.labels[i]] += xs[i];
      ++cnt[r.labels[i]];
    }
    double move = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (cnt[j] == 0) continue;  // empty cluster keeps its centroid
      const double nc = sum[j] / static_cast<double>(cnt[j]);
      move = std::max(move, std::abs(nc - c[j]));
      c[j] = nc;
    }
    if (move < tol) {
      // one final assignment against the settled centroids
      double s2 = 0.0;
      for (size_t i = 0; i < n; ++i) {
        const int a = detail::assign_one(xs[i], c);
        s2 += (xs[i] - c[a]) * (xs[i] - c[a]);
        r.labels[i] = static_cast<uint8_t>(a);
      }
      r.objective_history.push_back(s2);
      break;
    }
  }

  // relabel so cluster 0/1/2 are ascending in centroid (stable for ties)
  std::array<int, 3> ord = {0, 1, 2};
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    return c[a] < c[b] || (c[a] == c[b] && a < b);
  });
  std::array<uint8_t, 3> remap{};
  for (int pos = 0; pos < 3; ++pos) remap[ord[pos]] = static_cast<uint8_t>(pos);
  for (auto& l : r.labels) l = remap[l];
  r.centroids = {c[ord[0]], c[ord[1]], c[ord[2]]};
  return r;
}

}  // namespace n2d3
