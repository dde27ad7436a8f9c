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

#include "qnet/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qnet {

void FidelityConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("FidelityConfig: ") + name + " must be > 0");
    }
  };
  check(xi_per_km, "xi");
  check(coherence_time_s, "coherence_time");
  check(processing_delay_s, "processing_delay");
  check(light_speed_m_per_s, "light_speed");
}

WernerState::WernerState(double w) : w_(w) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw std::domain_error("Werner parameter must lie in [0, 1], got " + std::to_string(w));
  }
}

double channel_output_fidelity(const FidelityConfig& config, double distance_m) {
  if (distance_m < 0.0) throw std::domain_error("distance must be >= 0");
  const double d_km = distance_m / 1000.0;
  if (config.xi_mode == DegradationMode::kDecibel) {
    return std::pow(10.0, -config.xi_per_km * d_km / 10.0);
  }
  return std::exp(-config.xi_per_km * d_km);
}

WernerState fidelity_to_werner(double fidelity) {
  if (!(fidelity >= 0.25 && fidelity <= 1.0)) {
    throw std::domain_error("fidelity must lie in [0.25, 1] for a Werner state, got " +
                            std::to_string(fidelity));
  }
  // Clamp the last-ulp overshoot at F = 1/4.
  return WernerState(std::max(0.0, (4.0 * fidelity - 1.0) / 3.0));
}

WernerState decohere(WernerState state, const FidelityConfig& config, double distance_m) {
  if (distance_m < 0.0) throw std::domain_error("distance must be >= 0");
  const double tau = distance_m / config.light_speed_m_per_s + config.processing_delay_s;
  return WernerState(state.parameter() * std::exp(-tau / config.coherence_time_s));
}

double end_to_end_fidelity(const FidelityConfig& config, double distance_m) {
  // Past ~6.9 km the exponential model drops below the maximally mixed
  // state; the delivered state saturates there.
  const double f0 = std::max(0.25, channel_output_fidelity(config, distance_m));
  const WernerState channel = fidelity_to_werner(f0);
  return decohere(channel, config, distance_m).fidelity();
}

}  // namespace qnet
