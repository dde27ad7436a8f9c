// Copyright 2026 The qnet Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNET_RNG_HPP
#define QNET_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace qnet {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Streams drawn from one scenario seed. Each purpose gets an independent
/// key, so e.g. channel sampling never shifts the placement draws.
enum class StreamPurpose : std::uint64_t {
  kQbsPositions = 1,
  kQuPositions = 2,
  kCapacity = 3,
  kDemand = 4,
  kFidelityRequirement = 5,
  kChannelSampling = 6,
  kTest = 99,
};

/// Counter-based generator: the i-th output of a stream is
/// mix64(key + (i + 1) * golden). Output depends only on (key, counter), which
/// makes block-partitioned parallel sampling reproducible and portable.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  /// Key for a (seed, purpose) stream.
  static constexpr CounterRng stream(std::uint64_t seed, StreamPurpose purpose) noexcept {
    return CounterRng(mix64(mix64(seed) ^ (static_cast<std::uint64_t>(purpose) * kGolden)));
  }

  /// Independent child stream, e.g. one per Monte Carlo block.
  constexpr CounterRng substream(std::uint64_t index) const noexcept {
    return CounterRng(mix64(key_ ^ mix64(index + kGolden)));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal by Box-Muller (cosine branch only, no cached state).
  double normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gamma(shape, scale = 1) by Marsaglia-Tsang; shape < 1 uses the
  /// U^(1/shape) boost.
  double gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double boost = std::pow(uniform_open(), 1.0 / shape);
      return gamma(shape + 1.0) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double z = 0.0;
      double v = 0.0;
      do {
        z = normal();
        v = 1.0 + c * z;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_open();
      if (u < 1.0 - 0.0331 * z * z * z * z) return d * v;
      if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

/// Seed of the k-th regenerated snapshot when a draw is rejected.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t attempt) noexcept {
  return attempt == 0 ? seed : mix64(seed ^ mix64(attempt * CounterRng::kGolden));
}

}  // namespace qnet

#endif  // QNET_RNG_HPP
