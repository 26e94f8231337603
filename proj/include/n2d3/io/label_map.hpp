#pragma once

// Region label maps on disk: binary PGM (P5) or 8-bit grayscale PNG holding
// the raw label values 0..3, plus a fixed false-color rendering.

#include <array>
#include <cstdint>
#include <string>

#include "n2d3/core.hpp"
#include "n2d3/disentangle.hpp"
#include "n2d3/io/image_io.hpp"

namespace n2d3::io {

// region -> display color, indexed by the Region enum value
inline constexpr std::array<std::array<uint8_t, 3>, 4> kRegionPalette = {{
    {0, 0, 255},      // darkness
    {128, 170, 255},  // well_lit
    {0, 200, 0},      // light_effects
    {255, 230, 0},    // high_light
}};

inline LabelImage read_label_map(const std::string& path) {
  detail::File f;
  f.fp = std::fopen(path.c_str(), "rb");
  if (!f.fp) throw IoError(IoCode::kMissingFile, path);

  detail::RawImage raw;
  switch (detail::sniff_format(f.fp)) {
    case detail::Sniff::kPng:
      raw = detail::read_png_raw(path, f.fp);
      if (raw.channels != 1)
        throw IoError(IoCode::kBadColorspace, path,
                      "rgb png, expected grayscale labels");
      break;
    case detail::Sniff::kP5:
      std::fseek(f.fp, 2, SEEK_SET);
      raw = detail::read_pnm_raw(path, f.fp, 1);
      break;
    case detail::Sniff::kP6:
      throw IoError(IoCode::kBadColorspace, path,
                    "rgb pnm, expected P5 labels");
    default:
      throw IoError(IoCode::kUnknownFormat, path);
  }

  LabelImage out(raw.width, raw.height);
  for (size_t i = 0; i < raw.data.size(); ++i) {
    if (raw.data[i] > 3)
      throw IoError(IoCode::kBadPixel, path,
                    "label value " + std::to_string(raw.data[i]) +
                        " at index " + std::to_string(i));
    out.labels[i] = raw.data[i];
  }
  return out;
}

inline void write_label_map(const std::string& path, const LabelImage& map) {
  for (size_t i = 0; i < map.labels.size(); ++i)
    if (map.labels[i] > 3)
      throw IoError(IoCode::kBadPixel, path,
                    "label value " + std::to_string(map.labels[i]));

  if (detail::ends_with(path, ".png")) {
    detail::RawImage raw;
    raw.width = map.width;
    raw.height = map.height;
    raw.channels = 1;
    raw.data.assign(map.labels.begin(), map.labels.end());
    detail::write_png_raw(path, raw);
    return;
  }
  if (detail::ends_with(path, ".pgm")) {
    detail::File f;
    f.fp = std::fopen(path.c_str(), "wb");
    if (!f.fp) throw IoError(IoCode::kWriteFailed, path);
    std::fprintf(f.fp, "P5\n%d %d\n255\n", map.width, map.height);
    if (std::fwrite(map.labels.data(), 1, map.labels.size(), f.fp) !=
        map.labels.size())
      throw IoError(IoCode::kWriteFailed, path);
    if (std::fflush(f.fp) != 0 || std::ferror(f.fp))
      throw IoError(IoCode::kWriteFailed, path);
    return;
  }
  throw IoError(IoCode::kUnknownFormat, path, "use .png or .pgm");
}

inline RgbImage palette_render(const LabelImage& map);

// label map + false-color render in one step
inline void write_disentanglement(const DisentanglementMap& dmap,
                                  const std::string& path_labels,
                                  const std::string& path_palette) {
  write_label_map(path_labels, dmap.labels);
  write_image(path_palette, palette_render(dmap.labels));
}

inline RgbImage palette_render(const LabelImage& map) {
  RgbImage img(map.width, map.height);
  for (size_t i = 0; i < map.labels.size(); ++i) {
    const auto& c = kRegionPalette[map.labels[i] & 3];
    img.rgb[3 * i + 0] = c[0] / 255.0;
    img.rgb[3 * i + 1] = c[1] / 255.0;
    img.rgb[3 * i + 2] = c[2] / 255.0;
  }
  return img;
}

}  // namespace n2d3::io
