#pragma once

// RGB image file support: binary PPM (P6, maxval 255) and 8-bit PNG.
// Readers sniff the leading bytes, writers dispatch on the extension.

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "n2d3/core.hpp"
#include "n2d3/io/error.hpp"

namespace n2d3::io {

namespace detail {

// decoded 8-bit image, interleaved, 1 or 3 channels
struct RawImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> data;
};

inline void png_quiet_warning(png_structp, png_const_charp) {}

inline RawImage read_png_raw(const std::string& path, std::FILE* fp) {
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError(IoCode::kBadHeader, path, "png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError(IoCode::kBadHeader, path, "png init failed");
  }
  png_set_error_fn(png, png_get_error_ptr(png), nullptr, png_quiet_warning);

  RawImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoCode::kBadHeader, path, "png decode failed");
  }

  png_init_io(png, fp);
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);

  if (depth != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoCode::kBadDepth, path,
                  "bit depth " + std::to_string(depth) + ", expected 8");
  }
  int channels;
  switch (color) {
    case PNG_COLOR_TYPE_GRAY:
      channels = 1;
      break;
    case PNG_COLOR_TYPE_GRAY_ALPHA:
      png_set_strip_alpha(png);
      channels = 1;
      break;
    case PNG_COLOR_TYPE_RGB:
      channels = 3;
      break;
    case PNG_COLOR_TYPE_RGB_ALPHA:
      png_set_strip_alpha(png);
      channels = 3;
      break;
    default:
      png_destroy_read_struct(&png, &info, nullptr);
      throw IoError(IoCode::kBadColorspace, path,
                    "png color type " + std::to_string(color));
  }
  if (w == 0 || h == 0 || w > (1u << 16) || h > (1u << 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(IoCode::kBadDims, path);
  }

  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(w);
  img.height = static_cast<int>(h);
  img.channels = channels;
  img.data.resize(static_cast<size_t>(w) * h * channels);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    rows[y] = img.data.data() + static_cast<size_t>(y) * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

inline void write_png_raw(const std::string& path, const RawImage& img) {
  File f;
  f.fp = std::fopen(path.c_str(), "wb");
  if (!f.fp) throw IoError(IoCode::kWriteFailed, path);

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError(IoCode::kWriteFailed, path, "png init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError(IoCode::kWriteFailed, path, "png init failed");
  }
  png_set_error_fn(png, png_get_error_ptr(png), nullptr, png_quiet_warning);

  std::vector<png_const_bytep> rows(img.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(IoCode::kWriteFailed, path, "png encode failed");
  }
  png_init_io(png, f.fp);
  const int color =
      img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
               static_cast<png_uint_32>(img.height), 8, color,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y)
    rows[y] = img.data.data() +
              static_cast<size_t>(y) * img.width * img.channels;
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  if (std::fflush(f.fp) != 0 || std::ferror(f.fp))
    throw IoError(IoCode::kWriteFailed, path);
}

// pnm header token reader: skips whitespace and # comments
inline bool pnm_token(std::FILE* fp, std::string& tok) {
  tok.clear();
  int c = std::fgetc(fp);
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = std::fgetc(fp);
    } else if (std::isspace(c)) {
      c = std::fgetc(fp);
    } else {
      break;
    }
  }
  if (c == EOF) return false;
  while (c != EOF && !std::isspace(c) && c != '#') {
    tok.push_back(static_cast<char>(c));
    c = std::fgetc(fp);
  }
  if (c == '#') std::ungetc(c, fp);
  return true;
}

inline int pnm_int(std::FILE* fp, const std::string& path, const char* what) {
  std::string tok;
  if (!pnm_token(fp, tok))
    throw IoError(IoCode::kTruncated, path, std::string("missing ") + what);
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw IoError(IoCode::kBadHeader, path,
                    std::string(what) + " '" + tok + "'");
  long v = std::strtol(tok.c_str(), nullptr, 10);
  if (v <= 0 || v > (1 << 16))
    throw IoError(IoCode::kBadDims, path, std::string(what) + " " + tok);
  return static_cast<int>(v);
}

// shared body for P5/P6 after the magic was consumed
inline RawImage read_pnm_raw(const std::string& path, std::FILE* fp,
                             int channels) {
  RawImage img;
  img.channels = channels;
  img.width = pnm_int(fp, path, "width");
  img.height = pnm_int(fp, path, "height");
  std::string tok;
  if (!pnm_token(fp, tok)) throw IoError(IoCode::kTruncated, path, "maxval");
  if (tok != "255")
    throw IoError(IoCode::kBadDepth, path, "maxval " + tok + ", expected 255");
  // single whitespace byte between header and payload was consumed by the
  // token reader already
  const size_t n = static_cast<size_t>(img.width) * img.height * channels;
  img.data.resize(n);
  if (std::fread(img.data.data(), 1, n, fp) != n)
    throw IoError(IoCode::kTruncated, path, "pixel payload");
  unsigned char extra;
  if (std::fread(&extra, 1, 1, fp) == 1)
    throw IoError(IoCode::kTrailingData, path);
  return img;
}

inline const unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G',
                                         0x0d, 0x0a, 0x1a, 0x0a};

enum class Sniff { kPng, kP6, kP5, kUnknown };

inline Sniff sniff_format(std::FILE* fp) {
  unsigned char head[8];
  size_t got = std::fread(head, 1, 8, fp);
  std::fseek(fp, 0, SEEK_SET);
  if (got >= 8 && std::memcmp(head, kPngSig, 8) == 0) return Sniff::kPng;
  if (got >= 2 && head[0] == 'P' && head[1] == '6') return Sniff::kP6;
  if (got >= 2 && head[0] == 'P' && head[1] == '5') return Sniff::kP5;
  return Sniff::kUnknown;
}

inline bool ends_with(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() &&
         s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

}  // namespace detail

inline RgbImage read_image(const std::string& path) {
  detail::File f;
  f.fp = std::fopen(path.c_str(), "rb");
  if (!f.fp) throw IoError(IoCode::kMissingFile, path);

  detail::RawImage raw;
  switch (detail::sniff_format(f.fp)) {
    case detail::Sniff::kPng:
      raw = detail::read_png_raw(path, f.fp);
      if (raw.channels != 3)
        throw IoError(IoCode::kBadColorspace, path,
                      "grayscale png, expected rgb");
      break;
    case detail::Sniff::kP6:
      std::fseek(f.fp, 2, SEEK_SET);
      raw = detail::read_pnm_raw(path, f.fp, 3);
      break;
    case detail::Sniff::kP5:
      throw IoError(IoCode::kBadColorspace, path, "grayscale pnm, expected P6");
    default:
      throw IoError(IoCode::kUnknownFormat, path);
  }

  RgbImage img(raw.width, raw.height);
  const size_t n = img.pixels() * 3;
  for (size_t i = 0; i < n; ++i) img.rgb[i] = raw.data[i] / 255.0;
  return img;
}

inline void write_image(const std::string& path, const RgbImage& img) {
  detail::RawImage raw;
  raw.width = img.width;
  raw.height = img.height;
  raw.channels = 3;
  raw.data.resize(img.pixels() * 3);
  for (size_t i = 0; i < raw.data.size(); ++i) {
    double v = img.rgb[i];
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    raw.data[i] = static_cast<uint8_t>(std::lround(v * 255.0));
  }

  if (detail::ends_with(path, ".png")) {
    detail::write_png_raw(path, raw);
    return;
  }
  if (detail::ends_with(path, ".ppm")) {
    detail::File f;
    f.fp = std::fopen(path.c_str(), "wb");
    if (!f.fp) throw IoError(IoCode::kWriteFailed, path);
    std::fprintf(f.fp, "P6\n%d %d\n255\n", raw.width, raw.height);
    if (std::fwrite(raw.data.data(), 1, raw.data.size(), f.fp) !=
        raw.data.size())
      throw IoError(IoCode::kWriteFailed, path);
    if (std::fflush(f.fp) != 0 || std::ferror(f.fp))
      throw IoError(IoCode::kWriteFailed, path);
    return;
  }
  throw IoError(IoCode::kUnknownFormat, path, "use .png or .ppm");
}

}  // namespace n2d3::io
