#pragma once
// Counter-keyed random streams. Every consumer derives an independent
// substream from (seed, stream, index), so simulation results never depend
// on scheduling or worker count.

#include <array>
#include <cmath>
#include <cstdint>

#include "unicon/types.hpp"

namespace unicon::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding.
class Stream {
 public:
  Stream() : Stream(0, 0, 0) {}

  Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    std::uint64_t h = seed;
    (void)splitmix64(h);
    h ^= 0xD1B54A32D192ED03ULL * (stream + 1);
    (void)splitmix64(h);
    h ^= 0x9E3779B97F4A7C15ULL * (index + 1);
    for (auto& word : s_) word = splitmix64(h);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log argument.
  double uniform01_open() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform01_open()));
    const double theta = 2.0 * M_PI * uniform01();
    cached_ = r * std::sin(theta);
    have_cached_ = true;
    return r * std::cos(theta);
  }

  // Circularly symmetric complex normal with total variance `var`.
  cplx cgaussian(double var) {
    const double s = std::sqrt(var * 0.5);
    const double re = gaussian();
    const double im = gaussian();
    return {s * re, s * im};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> s_{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

inline Stream substream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Stream(seed, stream, index);
}

}  // namespace unicon::rng
