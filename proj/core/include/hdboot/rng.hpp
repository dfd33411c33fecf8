#pragma once

#include <cstdint>

#include "hdboot/stats.hpp"

namespace hdboot {

// Counter-based pseudo-random generator with explicit stream layout.
//
// Every random quantity in the library is drawn from a `CounterRng(seed,
// stream)` where `stream` identifies the consumer (bootstrap replicate
// index, CV split, simulation replication, ...). The k-th output of a
// stream is a pure function of (seed, stream, k): no shared state, so
// parallel consumers are bit-reproducible regardless of scheduling, and
// results are identical across platforms (no std::<distribution> use).
//
// Output function: splitmix64 finalizer applied to a Weyl sequence whose
// start is derived from (seed, stream) by two finalizer rounds.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    state_ = mix(mix(seed + kGamma) ^ mix(stream * kGamma + 0x1F123BB5159A55E5ULL));
  }

  std::uint64_t next_u64() {
    state_ += kGamma;
    return mix(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1): never returns exactly 0.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal via inverse-CDF (deterministic across platforms).
  double normal() { return normal_quantile(uniform01_open()); }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  /// Uniform index in [0, n) by 128-bit multiply-shift.
  std::uint64_t uniform_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return uniform01() < p; }

  /// +1 or -1 with equal probability.
  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  double chi_squared_1() {
    double z = normal();
    return z * z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace hdboot
