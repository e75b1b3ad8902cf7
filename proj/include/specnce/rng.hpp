#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "specnce/error.hpp"

namespace specnce {

// All randomness flows through this wrapper, seeded once and split per
// subsystem by a fixed label. Only the raw mt19937_64 output is consumed;
// the distributions are hand-rolled so that a given (seed, label) pair
// produces identical streams on every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  Rng(std::uint64_t seed, std::string_view label) : eng_(derive(seed, label)) {}

  /// Deterministic sub-seed for a labeled subsystem. Adding a new label
  /// never perturbs streams derived from existing labels.
  static std::uint64_t derive(std::uint64_t seed, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the label
    for (unsigned char c : label) {
      h ^= c;
      h *= 1099511628211ull;
    }
    return split_mix(seed ^ h);
  }

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one fresh pair of uniforms per call.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform integer in [0, n) without modulo bias (multiply-shift).
  std::size_t below(std::size_t n) {
    require(n > 0, ErrorCode::InvalidOption, "below(0)");
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  /// Index sampled proportionally to nonnegative weights[0..n).
  /// Inverse-CDF linear scan; deterministic for a fixed stream.
  template <class Vec>
  std::size_t discrete(const Vec& weights, std::size_t n) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += weights[i];
    require(total > 0.0, ErrorCode::AllZeroRow, "discrete: weights sum to zero");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    // Fall through only on accumulated rounding; last positive weight wins.
    for (std::size_t i = n; i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return n - 1;
  }

 private:
  static std::uint64_t split_mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::mt19937_64 eng_;
};

}  // namespace specnce
