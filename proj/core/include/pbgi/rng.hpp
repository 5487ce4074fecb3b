#pragma once

// Deterministic random primitives. Everything here is a pure function of the
// seed so that patterns, noise, and whole experiment sweeps replay
// bit-identically, independent of the standard library's distribution
// implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace pbgi::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives an independent stream seed for (seed, index). Used to sub-seed
// pattern k of a sequence and frame k of a noisy scan.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  return splitmix64(state);
}

// One fair bit per call.
inline int coin_flip(std::mt19937_64& engine) {
  return static_cast<int>(engine() >> 63);
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Standard normal deviates via Box-Muller; avoids std::normal_distribution,
// whose output sequence is implementation-defined.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform01(engine_);  // (0, 1]
    const double u2 = uniform01(engine_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pbgi::rng
