#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "n2d3/disentangle.hpp"
#include "n2d3/rng.hpp"
#include "support/oracles.hpp"

using n2d3::Mask;
using n2d3::Plane;
using n2d3::Region;
using n2d3::RgbImage;

TEST_CASE("illuminance is the per-pixel channel maximum") {
  RgbImage img(3, 1);
  const double px[3][3] = {{0.1, 0.7, 0.3}, {0.9, 0.2, 0.2}, {0.0, 0.0, 0.0}};
  for (int x = 0; x < 3; ++x)
    for (int c = 0; c < 3; ++c) img.at(x, 0, c) = px[x][c];
  const Plane l = n2d3::illuminance(img, 1);
  CHECK(l.v[0] == 0.7);
  CHECK(l.v[1] == 0.9);
  CHECK(l.v[2] == 0.0);
}

TEST_CASE("light-effect z-scores on the 8x8 single-hot plane") {
  // one pixel at 1 among 63 zeros: mean 1/64, population std sqrt(63)/64,
  // so the hot pixel scores sqrt(63) and every other pixel is negative.
  Plane n(8, 8, 0.0);
  n.at(5, 2) = 1.0;

  SECTION("hot pixel inside the well-lit mask becomes the sole light effect") {
    Mask wl(8, 8, 1);
    const auto ex = n2d3::extract_light_effects(n, wl);
    CHECK(ex.light_effects.count() == 1);
    CHECK(ex.light_effects.test(5, 2));
    CHECK(ex.well_lit.count() == 63);
    CHECK_FALSE(ex.well_lit.test(5, 2));
    CHECK(ex.soft_response.at(5, 2) ==
          Catch::Approx(oracle::kZHot).margin(1e-12));
    // the 63 cold pixels sit below the mean: rectified response is zero
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x)
        if (x != 5 || y != 2) CHECK(ex.soft_response.at(x, y) == 0.0);
    // frozen statistics behind that z-score
    CHECK(oracle::kZMean == 1.0 / 64.0);
    CHECK(oracle::kZHot ==
          Catch::Approx((1.0 - oracle::kZMean) / oracle::kZStd).margin(1e-15));
  }

  SECTION("hot pixel outside the well-lit mask is not claimed") {
    Mask wl(8, 8, 1);
    wl.m[2 * 8 + 5] = 0;  // carve the hot pixel out beforehand
    const auto ex = n2d3::extract_light_effects(n, wl);
    CHECK(ex.light_effects.count() == 0);
    CHECK(ex.well_lit.count() == 63);
    // soft response still reports the z-score; masks just don't claim it
    CHECK(ex.soft_response.at(5, 2) > 0.0);
  }
}

TEST_CASE("zero-variance plane yields no light effects") {
  Plane n(6, 4, 0.37);
  Mask wl(6, 4, 1);
  const auto ex = n2d3::extract_light_effects(n, wl);
  CHECK(ex.light_effects.count() == 0);
  CHECK(ex.well_lit.count() == 24);
  for (double v : ex.soft_response.v) CHECK(v == 0.0);
}

TEST_CASE("shape mismatch throws") {
  CHECK_THROWS_AS(n2d3::extract_light_effects(Plane(4, 4), Mask(5, 4)),
                  std::invalid_argument);
}

TEST_CASE("disentanglement is a partition") {
  // every pixel belongs to exactly one region and the label image agrees
  n2d3::Rng rng(13);
  RgbImage img(40, 30);
  for (double& v : img.rgb) v = rng.unit();
  const auto d = n2d3::disentangle(img, {}, 1);
  REQUIRE(d.width == 40);
  REQUIRE(d.height == 30);
  for (size_t i = 0; i < d.labels.labels.size(); ++i) {
    const int total = (d.darkness.m[i] != 0) + (d.well_lit.m[i] != 0) +
                      (d.light_effects.m[i] != 0) + (d.high_light.m[i] != 0);
    CHECK(total == 1);
    const Mask* by_label = nullptr;
    switch (static_cast<Region>(d.labels.labels[i])) {
      case Region::kDarkness: by_label = &d.darkness; break;
      case Region::kWellLit: by_label = &d.well_lit; break;
      case Region::kLightEffects: by_label = &d.light_effects; break;
      case Region::kHighLight: by_label = &d.high_light; break;
    }
    REQUIRE(by_label != nullptr);
    CHECK(by_label->m[i] != 0);
  }
  CHECK(d.centroids[0] <= d.centroids[1]);
  CHECK(d.centroids[1] <= d.centroids[2]);
}

TEST_CASE("a constant image is pure darkness") {
  RgbImage img(16, 10);
  for (double& v : img.rgb) v = 0.04;
  const auto d = n2d3::disentangle(img, {}, 1);
  CHECK(d.darkness.count() == 16 * 10);
  CHECK(d.well_lit.count() == 0);
  CHECK(d.light_effects.count() == 0);
  CHECK(d.high_light.count() == 0);
  for (auto l : d.labels.labels)
    CHECK(l == static_cast<uint8_t>(Region::kDarkness));
}

TEST_CASE("three flat luminance bands land in the three clusters") {
  // left third dim, middle third mid gray, right third bright; no chromatic
  // structure anywhere, so no light effects are carved out
  RgbImage img(30, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 30; ++x) {
      const double v = x < 10 ? 0.05 : (x < 20 ? 0.45 : 0.9);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = v;
    }
  const auto d = n2d3::disentangle(img, {}, 1);
  CHECK(d.centroids[0] == Catch::Approx(0.05).margin(1e-12));
  CHECK(d.centroids[1] == Catch::Approx(0.45).margin(1e-12));
  CHECK(d.centroids[2] == Catch::Approx(0.9).margin(1e-12));
  CHECK(d.darkness.count() == 120);
  CHECK(d.high_light.count() == 120);
  CHECK(d.well_lit.count() + d.light_effects.count() == 120);
  // gray bands carry no real chromatic gradient; the invariant is exactly
  // zero wherever the filter support stays inside one band, so any pixels
  // promoted to light effects by rounding residue hug the two band edges
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 30; ++x)
      if (d.light_effects.test(x, y)) {
        const bool near_edge = (x >= 6 && x <= 13) || (x >= 16 && x <= 23);
        CHECK(near_edge);
      }
}

TEST_CASE("disentangle is bit-identical across thread counts") {
  n2d3::Rng rng(29);
  RgbImage img(37, 23);
  for (double& v : img.rgb) v = rng.unit();
  const auto base = n2d3::disentangle(img, {}, 1);
  for (int threads : {2, 5}) {
    const auto d = n2d3::disentangle(img, {}, threads);
    CHECK(d.labels.labels == base.labels.labels);
    CHECK(d.centroids == base.centroids);
    CHECK(d.soft_light_effects.v == base.soft_light_effects.v);
  }
}
