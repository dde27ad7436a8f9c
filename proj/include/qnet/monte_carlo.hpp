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

#ifndef QNET_MONTE_CARLO_HPP
#define QNET_MONTE_CARLO_HPP

#include <cstdint>

#include "qnet/fso_channel.hpp"
#include "qnet/rng.hpp"

namespace qnet {

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

/// Samples are drawn in fixed blocks; block b always uses substream b of
/// the caller's stream, so serial and parallel runs agree bit-for-bit.
inline constexpr std::uint64_t kMonteCarloBlock = std::uint64_t{1} << 16;

/// Sampling estimate of Pr(composite gain >= eta_th). OpenMP over blocks.
MonteCarloEstimate estimate_success_probability(const LinkChannel& link, double eta_th,
                                                std::uint64_t samples, CounterRng stream);

/// Single-threaded reference for the above.
MonteCarloEstimate estimate_success_probability_serial(const LinkChannel& link, double eta_th,
                                                       std::uint64_t samples, CounterRng stream);

}  // namespace qnet

#endif  // QNET_MONTE_CARLO_HPP
