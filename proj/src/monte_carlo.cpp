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

#include "qnet/monte_carlo.hpp"

#include <algorithm>
#include <cmath>

namespace qnet {
namespace {

std::uint64_t count_block(const LinkChannel& link, double eta_th, CounterRng rng,
                          std::uint64_t n) {
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (sample_composite_gain(link, rng) >= eta_th) ++hits;
  }
  return hits;
}

MonteCarloEstimate finish(std::uint64_t hits, std::uint64_t samples) {
  MonteCarloEstimate est;
  est.samples = samples;
  if (samples == 0) return est;
  est.mean = static_cast<double>(hits) / static_cast<double>(samples);
  est.std_error = std::sqrt(est.mean * (1.0 - est.mean) / static_cast<double>(samples));
  return est;
}

std::uint64_t block_size(std::uint64_t b, std::uint64_t samples) {
  return std::min(kMonteCarloBlock, samples - b * kMonteCarloBlock);
}

}  // namespace

MonteCarloEstimate estimate_success_probability(const LinkChannel& link, double eta_th,
                                                std::uint64_t samples, CounterRng stream) {
  const auto blocks = static_cast<std::int64_t>((samples + kMonteCarloBlock - 1) / kMonteCarloBlock);
  std::uint64_t hits = 0;
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    hits += count_block(link, eta_th, stream.substream(ub), block_size(ub, samples));
  }
  return finish(hits, samples);
}

MonteCarloEstimate estimate_success_probability_serial(const LinkChannel& link, double eta_th,
                                                       std::uint64_t samples, CounterRng stream) {
  const std::uint64_t blocks = (samples + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::uint64_t hits = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    hits += count_block(link, eta_th, stream.substream(b), block_size(b, samples));
  }
  return finish(hits, samples);
}

}  // namespace qnet
