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

#ifndef QNET_FIDELITY_HPP
#define QNET_FIDELITY_HPP

namespace qnet {

/// kNatural: F0 = exp(-xi d_km). kDecibel: F0 = 10^(-xi d_km / 10).
enum class DegradationMode { kNatural, kDecibel };

struct FidelityConfig {
  double xi_per_km = 0.2;
  double coherence_time_s = 2.43e-3;
  double processing_delay_s = 4e-6;
  double light_speed_m_per_s = 3e8;
  DegradationMode xi_mode = DegradationMode::kNatural;

  void validate() const;
};

/// Werner parameter w in [0, 1].
class WernerState {
 public:
  /// Throws std::domain_error outside [0, 1].
  explicit WernerState(double w);

  double parameter() const noexcept { return w_; }
  double fidelity() const noexcept { return (3.0 * w_ + 1.0) / 4.0; }

 private:
  double w_;
};

double channel_output_fidelity(const FidelityConfig& config, double distance_m);

/// w = (4F - 1)/3. Throws std::domain_error for F < 1/4 or F > 1.
WernerState fidelity_to_werner(double fidelity);

/// Memory decoherence over tau = d/c + T_p: w' = w exp(-tau / T_c).
WernerState decohere(WernerState state, const FidelityConfig& config, double distance_m);

/// Channel fidelity -> Werner -> decoherence -> delivered fidelity.
double end_to_end_fidelity(const FidelityConfig& config, double distance_m);

}  // namespace qnet

#endif  // QNET_FIDELITY_HPP
