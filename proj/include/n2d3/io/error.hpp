#pragma once

#include <cstdio>
#include <string>

#include "n2d3/core.hpp"

namespace n2d3::io {

namespace detail {

struct File {
  std::FILE* fp = nullptr;
  ~File() {
    if (fp) std::fclose(fp);
  }
};

}  // namespace detail

// Every way an input can be malformed maps to exactly one of these; readers
// never crash or partially succeed.
enum class IoCode {
  kMissingFile,
  kBadMagic,
  kBadVersion,
  kBadRank,
  kBadDims,
  kDimOverflow,
  kTruncated,
  kTrailingData,
  kBadHeader,
  kBadDepth,
  kBadColorspace,
  kBadPixel,
  kUnknownFormat,
  kWriteFailed,
};

inline const char* io_code_name(IoCode c) {
  switch (c) {
    case IoCode::kMissingFile: return "missing file";
    case IoCode::kBadMagic: return "bad magic";
    case IoCode::kBadVersion: return "unsupported version";
    case IoCode::kBadRank: return "rank out of range";
    case IoCode::kBadDims: return "invalid dimensions";
    case IoCode::kDimOverflow: return "dimension overflow";
    case IoCode::kTruncated: return "truncated payload";
    case IoCode::kTrailingData: return "trailing data";
    case IoCode::kBadHeader: return "malformed header";
    case IoCode::kBadDepth: return "unsupported bit depth";
    case IoCode::kBadColorspace: return "unsupported colorspace";
    case IoCode::kBadPixel: return "invalid pixel value";
    case IoCode::kUnknownFormat: return "unknown format";
    case IoCode::kWriteFailed: return "write failed";
  }
  return "io error";
}

class IoError : public Error {
 public:
  IoError(IoCode code, const std::string& path, const std::string& detail = "")
      : Error(path + ": " + io_code_name(code) +
              (detail.empty() ? "" : " (" + detail + ")")),
        code_(code) {}
  IoCode code() const { return code_; }

 private:
  IoCode code_;
};

}  // namespace n2d3::io
