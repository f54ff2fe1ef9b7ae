#pragma once
// Error taxonomy, deterministic RNG, and a small checksum.
//
// The RNG avoids std::uniform_*_distribution on purpose: their output streams
// are implementation-defined, and seeds here must reproduce bit-identical
// problems across standard libraries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvcs {

// Raised when an iteration or a numeric contract breaks (maps to exit code 3).
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on serialization/file problems (maps to exit code 4).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Box-Muller; both values of a pair are used.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double t = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Unbiased integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = gen_();
      if (r >= threshold) return r % n;
    }
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// FNV-1a 64-bit, used for payload checksums in bundles and manifests.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace tvcs
