#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace n2d3 {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Single-channel double plane, row-major.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int w, int h, double fill = 0.0)
      : width(w), height(h),
        v(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Plane: empty size");
  }

  double& at(int x, int y) {
    return v[static_cast<size_t>(y) * static_cast<size_t>(width) +
             static_cast<size_t>(x)];
  }
  double at(int x, int y) const {
    return v[static_cast<size_t>(y) * static_cast<size_t>(width) +
             static_cast<size_t>(x)];
  }
  size_t size() const { return v.size(); }
  bool same_shape(const Plane& o) const {
    return width == o.width && height == o.height;
  }
};

// Interleaved RGB, channels in [0,1] for images read from files.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;  // 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h)
      : width(w), height(h),
        rgb(3u * static_cast<size_t>(w) * static_cast<size_t>(h), 0.0) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("RgbImage: empty size");
  }

  size_t idx(int x, int y) const {
    return 3u * (static_cast<size_t>(y) * static_cast<size_t>(width) +
                 static_cast<size_t>(x));
  }
  double& at(int x, int y, int c) { return rgb[idx(x, y) + static_cast<size_t>(c)]; }
  double at(int x, int y, int c) const {
    return rgb[idx(x, y) + static_cast<size_t>(c)];
  }
  size_t pixels() const {
    return static_cast<size_t>(width) * static_cast<size_t>(height);
  }
};

struct Mask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> m;

  Mask() = default;
  Mask(int w, int h, uint8_t fill = 0)
      : width(w), height(h),
        m(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Mask: empty size");
  }
  bool test(size_t i) const { return m[i] != 0; }
  bool test(int x, int y) const {
    return m[static_cast<size_t>(y) * static_cast<size_t>(width) +
             static_cast<size_t>(x)] != 0;
  }
  size_t count() const {
    size_t n = 0;
    for (uint8_t b : m) n += b != 0;
    return n;
  }
};

// Region labels of the disentanglement, also the label-map pixel values.
enum class Region : uint8_t {
  kDarkness = 0,
  kWellLit = 1,
  kLightEffects = 2,
  kHighLight = 3,
};

struct LabelImage {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> labels;

  LabelImage() = default;
  LabelImage(int w, int h, uint8_t fill = 0)
      : width(w), height(h),
        labels(static_cast<size_t>(w) * static_cast<size_t>(h), fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("LabelImage: empty size");
  }
  uint8_t& at(int x, int y) {
    return labels[static_cast<size_t>(y) * static_cast<size_t>(width) +
                  static_cast<size_t>(x)];
  }
  uint8_t at(int x, int y) const {
    return labels[static_cast<size_t>(y) * static_cast<size_t>(width) +
                  static_cast<size_t>(x)];
  }
};

}  // namespace n2d3
