#pragma once

#include <cmath>
#include <cstdint>

namespace posecal {

/// Deterministic pseudo-random generator with a fixed, documented algorithm,
/// so that seeded outputs are reproducible across platforms and compilers
/// (std::normal_distribution and friends are not specified bit-exactly).
///
/// State update is xoshiro256++ (Blackman & Vigna), seeded by running
/// splitmix64 over the 64-bit seed. Derived draws:
///   - uniform01(): next()/2^64 mapped through the top 53 bits,
///   - normal(): Box-Muller on two uniform01() draws, one value per call
///     (the second value of each pair is discarded to keep the stream
///     position a simple function of the number of calls).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      // splitmix64
      x += 0x9e3779b97f4a7c15ull;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 bits of resolution.
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection-free modulo is fine here; bias is < 2^-53 of the range for
    // the small n used in sampling and irrelevant to correctness.
    return next() % n;
  }

  /// Standard normal deviate via Box-Muller.
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    while (u1 == 0.0) {
      u1 = uniform01();
      u2 = uniform01();
    }
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double normal(double mean, double stddev) {
    return mean + stddev * normal();
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }

  std::uint64_t state_[4] = {};
};

}  // namespace posecal
