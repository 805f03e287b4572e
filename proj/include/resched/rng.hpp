#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "resched/rational.hpp"

namespace resched {

// All randomness flows from one 64-bit master seed. Substreams are derived
// as splitmix64(master ^ fnv1a(tag)), so every module draws from an
// independent, reproducible stream. mt19937_64 output is fully specified by
// the standard, which keeps runs byte-identical across platforms.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

inline uint64_t substream_seed(uint64_t master, std::string_view tag) {
  return splitmix64(master ^ fnv1a(tag));
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next() { return eng_(); }

  // Uniform draw in [0, n) via rejection; avoids the implementation-defined
  // behaviour of std::uniform_int_distribution.
  uint64_t below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  // Exact Bernoulli with rational success probability (clamped to [0,1]).
  bool bernoulli(const Rat& p) {
    if (p.sign() <= 0) return false;
    if (p >= Rat(1)) return true;
    return below(static_cast<uint64_t>(p.den())) <
           static_cast<uint64_t>(p.num());
  }

  double unit() {  // [0,1) with 53 random bits
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace resched
