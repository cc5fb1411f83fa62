#pragma once

#include <cmath>
#include <cstdint>

namespace dsf {

/// splitmix64; used only to expand seeds into generator state.
struct SplitMix64 {
  std::uint64_t state;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

/// xoshiro256** 1.0.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& s : s_) s = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5ULL, 7) * 9ULL;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

/// Deterministic stream of uniforms, unbiased bounded integers and
/// Box-Muller normals on top of xoshiro256**.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next_u64() { return rng_.next(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(rng_.next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double uniform_open0() {
    return static_cast<double>((rng_.next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased integer in [0, n) by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = rng_.next();
      if (r >= threshold) return r % n;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open0();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  Xoshiro256ss rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dsf
