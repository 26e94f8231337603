#pragma once

// Tensor container:
//   bytes 0..7   magic "N2D3TENS"
//   u32 LE       version, currently 1
//   u32 LE       rank, 1..4
//   rank*u32 LE  dims, each >= 1
//   payload      float32 LE, row-major, product(dims) values

#include <bit>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "n2d3/core.hpp"
#include "n2d3/io/error.hpp"

namespace n2d3::io {

inline constexpr char kTensorMagic[8] = {'N', '2', 'D', '3', 'T', 'E', 'N', 'S'};
inline constexpr uint32_t kTensorVersion = 1;
inline constexpr uint32_t kTensorMaxRank = 4;
// caps the payload at 1 GiB worth of floats
inline constexpr uint64_t kTensorMaxElems = (1ull << 30) / 4u;

struct Tensor {
  std::vector<uint32_t> dims;
  std::vector<float> data;

  uint64_t elems() const {
    uint64_t n = 1;
    for (uint32_t d : dims) n *= d;
    return dims.empty() ? 0 : n;
  }
};

namespace detail {

inline void put_u32le(std::FILE* fp, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  std::fwrite(b, 1, 4, fp);
}

inline bool get_u32le(std::FILE* fp, uint32_t& v) {
  unsigned char b[4];
  if (std::fread(b, 1, 4, fp) != 4) return false;
  v = static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
      (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
  return true;
}

}  // namespace detail

inline void write_tensor(const std::string& path, const Tensor& t) {
  if (t.dims.empty() || t.dims.size() > kTensorMaxRank)
    throw IoError(IoCode::kBadRank, path, "writer given bad rank");
  uint64_t n = 1;
  for (uint32_t d : t.dims) {
    if (d == 0) throw IoError(IoCode::kBadDims, path, "writer given zero dim");
    n *= d;
    if (n > kTensorMaxElems)
      throw IoError(IoCode::kDimOverflow, path, "writer given oversized dims");
  }
  if (n != t.data.size())
    throw IoError(IoCode::kBadDims, path, "writer data/dims mismatch");

  detail::File f;
  f.fp = std::fopen(path.c_str(), "wb");
  if (!f.fp) throw IoError(IoCode::kWriteFailed, path);
  if (std::fwrite(kTensorMagic, 1, 8, f.fp) != 8)
    throw IoError(IoCode::kWriteFailed, path);
  detail::put_u32le(f.fp, kTensorVersion);
  detail::put_u32le(f.fp, static_cast<uint32_t>(t.dims.size()));
  for (uint32_t d : t.dims) detail::put_u32le(f.fp, d);
  for (float v : t.data)
    detail::put_u32le(f.fp, std::bit_cast<uint32_t>(v));
  if (std::fflush(f.fp) != 0 || std::ferror(f.fp))
    throw IoError(IoCode::kWriteFailed, path);
}

inline Tensor read_tensor(const std::string& path) {
  detail::File f;
  f.fp = std::fopen(path.c_str(), "rb");
  if (!f.fp) throw IoError(IoCode::kMissingFile, path);

  char magic[8];
  if (std::fread(magic, 1, 8, f.fp) != 8)
    throw IoError(IoCode::kTruncated, path, "header");
  for (int i = 0; i < 8; ++i)
    if (magic[i] != kTensorMagic[i]) throw IoError(IoCode::kBadMagic, path);

  uint32_t version = 0, rank = 0;
  if (!detail::get_u32le(f.fp, version))
    throw IoError(IoCode::kTruncated, path, "version");
  if (version != kTensorVersion)
    throw IoError(IoCode::kBadVersion, path,
                  "version " + std::to_string(version));
  if (!detail::get_u32le(f.fp, rank))
    throw IoError(IoCode::kTruncated, path, "rank");
  if (rank < 1 || rank > kTensorMaxRank)
    throw IoError(IoCode::kBadRank, path, "rank " + std::to_string(rank));

  Tensor t;
  t.dims.resize(rank);
  uint64_t n = 1;
  for (uint32_t i = 0; i < rank; ++i) {
    if (!detail::get_u32le(f.fp, t.dims[i]))
      throw IoError(IoCode::kTruncated, path, "dims");
    if (t.dims[i] == 0) throw IoError(IoCode::kBadDims, path, "zero dim");
    n *= t.dims[i];
    if (n > kTensorMaxElems) throw IoError(IoCode::kDimOverflow, path);
  }
  t.data.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    uint32_t bits = 0;
    if (!detail::get_u32le(f.fp, bits))
      throw IoError(IoCode::kTruncated, path,
                    "payload at element " + std::to_string(i));
    t.data[i] = std::bit_cast<float>(bits);
  }
  unsigned char extra;
  if (std::fread(&extra, 1, 1, f.fp) == 1)
    throw IoError(IoCode::kTrailingData, path);
  return t;
}

// rank-2 [height, width] bridges for single planes
inline Tensor tensor_from_plane(const Plane& p) {
  Tensor t;
  t.dims = {static_cast<uint32_t>(p.height), static_cast<uint32_t>(p.width)};
  t.data.assign(p.v.begin(), p.v.end());
  return t;
}

inline Plane plane_from_tensor(const Tensor& t, const std::string& path) {
  if (t.dims.size() != 2)
    throw IoError(IoCode::kBadRank, path, "expected rank-2 plane");
  Plane p(static_cast<int>(t.dims[1]), static_cast<int>(t.dims[0]));
  for (size_t i = 0; i < t.data.size(); ++i)
    p.v[i] = static_cast<double>(t.data[i]);
  return p;
}

}  // namespace n2d3::io
