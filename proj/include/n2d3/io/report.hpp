#pragma once

// Plain-text run reports: ordered "key = value" lines.  Doubles are printed
// with %.17g so a parse of the written file recovers them bit-exactly.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "n2d3/io/error.hpp"

namespace n2d3::io {

class Report {
 public:
  void add(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    entries_.emplace_back(key, buf);
  }
  void add(const std::string& key, long long value) {
    entries_.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, int value) {
    entries_.emplace_back(key, std::to_string(value));
  }
  void add(const std::string& key, bool value) {
    entries_.emplace_back(key, value ? "true" : "false");
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  const std::string* find(const std::string& key) const {
    for (const auto& [k, v] : entries_)
      if (k == key) return &v;
    return nullptr;
  }

  std::string str() const {
    std::ostringstream os;
    for (const auto& [k, v] : entries_) os << k << " = " << v << "\n";
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError(IoCode::kWriteFailed, path);
    os << str();
    if (!os) throw IoError(IoCode::kWriteFailed, path);
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

inline Report parse_report(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(IoCode::kMissingFile, path);
  Report rep;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto sep = line.find(" = ");
    if (sep == std::string::npos || sep == 0)
      throw IoError(IoCode::kBadHeader, path,
                    "line " + std::to_string(lineno) + " is not 'key = value'");
    rep.add(line.substr(0, sep), line.substr(sep + 3));
  }
  return rep;
}

}  // namespace n2d3::io
