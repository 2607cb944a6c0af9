#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rgr {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over raw bytes. Used for feature hashing and cache keys; must stay
/// stable across platforms and releases (hashes appear in files).
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = seed;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline uint64_t fnv1a64_str(std::string_view s, uint64_t seed = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), seed);
}

/// Deterministic random stream. All randomness in the project flows from a
/// single master seed expanded through `derive`, so any sub-computation can be
/// replayed in isolation. Sampling helpers avoid std distributions, whose
/// algorithms are implementation-defined; only the mt19937_64 engine (which is
/// fully specified) is taken from the standard library.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : eng_(seed) {}

  static RngStream derive(uint64_t master, uint64_t a = 0, uint64_t b = 0, uint64_t c = 0,
                          uint64_t d = 0) {
    uint64_t s = splitmix64(master ^ 0x8f1bbcdc2f5a7e91ULL);
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    s = splitmix64(s ^ d);
    return RngStream(s);
  }

  uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53 bits of precision.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) { return static_cast<int>(next_bounded(static_cast<uint64_t>(n))); }

  /// Draw an index from an unnormalized nonnegative weight vector.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform() * total;
    double cum = 0.0;
    for (size_t i = 0; i + 1 < weights.size(); ++i) {
      cum += weights[i];
      if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  /// Fisher-Yates; std::shuffle is implementation-defined, this is not.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = next_bounded(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  // Unbiased bounded draw by rejection.
  uint64_t next_bounded(uint64_t n) {
    uint64_t threshold = (0 - n) % n;
    for (;;) {
      uint64_t r = eng_();
      if (r >= threshold) return r % n;
    }
  }

  std::mt19937_64 eng_;
};

}  // namespace rgr
