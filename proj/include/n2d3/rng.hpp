#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace n2d3 {

// Seeded deterministic generator. The engine is std::mt19937_64 (a fixed,
// named algorithm); all draws below consume its raw stream directly because
// the standard distributions are implementation-defined and would break the
// bit-reproducibility contract.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t raw() { return eng_(); }

  // unbiased uniform draw from [0, n)
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n == 0");
    const uint64_t min = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const uint64_t r = eng_();
      if (r >= min) return r % n;
    }
  }

  // uniform in [0, 1), 53-bit resolution
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // deterministic partial Fisher-Yates: after the call, v[0..k) is a uniform
  // without-replacement sample of the original contents
  template <typename T>
  void partial_shuffle(std::vector<T>& v, size_t k) {
    const size_t n = v.size();
    if (k > n) k = n;
    for (size_t i = 0; i < k; ++i) {
      const size_t j = i + static_cast<size_t>(below(n - i));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace n2d3
