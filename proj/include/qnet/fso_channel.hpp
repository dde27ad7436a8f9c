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

#ifndef QNET_FSO_CHANNEL_HPP
#define QNET_FSO_CHANNEL_HPP

#include <stdexcept>
#include <string>

#include "qnet/rng.hpp"

namespace qnet {

/// How the pointing-jitter value is turned into a displacement at the
/// receiver: kAngular uses sigma = sigma_s * d, kMetric reads sigma_s as a
/// fixed displacement in millimetres (1 mrad -> 1 mm).
enum class PointingJitterMode { kAngular, kMetric };

/// Per-link physical constants. Defaults are the reference deployment
/// values (1550 nm, clear-air attenuation, moderate turbulence).
struct ChannelConfig {
  double kappa_db_per_km = 0.43;
  double aperture_radius_m = 0.25;
  double sigma_s_mrad = 1.0;
  double theta_d_mrad = 8.0;
  double cn2 = 5e-14;  // m^(-2/3)
  double wavelength_m = 1550e-9;
  double responsivity = 0.95;
  double eta_th = 0.05;
  PointingJitterMode jitter_mode = PointingJitterMode::kAngular;

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

struct LinkGeometry {
  double distance_m = 0.0;
};

struct TurbulenceParams {
  double rytov_var = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

struct PointingParams {
  double beam_width_m = 0.0;
  double ratio_v = 0.0;
  double max_gain = 0.0;  // A = erf(v)^2
  double equiv_beam_width_m = 0.0;
  double gamma = 0.0;
};

/// Everything needed to evaluate or sample one link's composite gain.
struct LinkChannel {
  double responsivity = 0.0;
  double atmospheric_gain = 0.0;
  TurbulenceParams turbulence;
  PointingParams pointing;
};

/// Raised when adaptive quadrature misses its error target.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

/// 10^(-kappa d_km / 10). Accepts d = 0.
double atmospheric_loss(const ChannelConfig& config, LinkGeometry geom);

/// 1.23 Cn2 k^(7/6) d^(11/6) with k = 2 pi / lambda. Throws
/// std::domain_error for d <= 0.
double rytov_variance(const ChannelConfig& config, LinkGeometry geom);

/// Far-field Gamma-Gamma shape parameters from the Rytov variance.
TurbulenceParams gamma_gamma_params(double rytov_var);

PointingParams pointing_params(const ChannelConfig& config, LinkGeometry geom);

LinkChannel characterize(const ChannelConfig& config, LinkGeometry geom);

/// Gamma-Gamma density of the unit-mean turbulence gain, evaluated in log
/// space so large alpha, beta do not overflow.
double gamma_gamma_log_pdf(double u, double alpha, double beta);
double gamma_gamma_pdf(double u, double alpha, double beta);

/// Chernoff bound on Pr(XY > t) for unit-mean Gamma variates X, Y.
double gamma_gamma_tail_bound(double t, double alpha, double beta);

/// Smallest doubling point u with gamma_gamma_tail_bound(u) < tail.
double gamma_gamma_upper_limit(double alpha, double beta, double tail);

/// Integral of the Gamma-Gamma density over (0, upper limit); 1 up to the
/// quadrature and tail error.
double gamma_gamma_total_mass(double alpha, double beta);

/// Pr(g^p >= z) for the pointing gain with support [0, A].
double pointing_exceedance(double z, double max_gain, double gamma);

/// Pr(R g^l g^p g^f >= eta_th) by one-dimensional quadrature over the
/// turbulence gain. Throws NumericError if the error estimate exceeds 1e-6.
double success_probability(const ChannelConfig& config, LinkGeometry geom);
double success_probability(const LinkChannel& link, double eta_th);

double sample_pointing_gain(const PointingParams& pointing, CounterRng& rng);
double sample_turbulence_gain(const TurbulenceParams& turbulence, CounterRng& rng);

/// One draw of R g^l g^p g^f.
double sample_composite_gain(const ChannelConfig& config, LinkGeometry geom, CounterRng& rng);
double sample_composite_gain(const LinkChannel& link, CounterRng& rng);

}  // namespace qnet

#endif  // QNET_FSO_CHANNEL_HPP
