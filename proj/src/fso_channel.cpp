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

#include "qnet/fso_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qnet/special_functions.hpp"

namespace qnet {
namespace {

constexpr double kTailMass = 1e-14;
constexpr double kAbsErrorTarget = 1e-6;
constexpr double kRelTolerance = 1e-10;
constexpr unsigned kMaxDepth = 15;
constexpr int kMaxPieces = 4000;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("ChannelConfig: ") + name +
                                " must be finite and > 0, got " + std::to_string(value));
  }
}

void require_distance(LinkGeometry geom) {
  if (!(geom.distance_m > 0.0) || !std::isfinite(geom.distance_m)) {
    throw std::domain_error("link distance must be > 0, got " + std::to_string(geom.distance_m));
  }
}

// Unit-mean Gamma(k) upper tail, Chernoff: exp(-k (x - 1 - ln x)), x > 1.
double gamma_tail(double x, double shape) {
  if (x <= 1.0) return 1.0;
  return std::exp(-shape * (x - 1.0 - std::log(x)));
}

struct Integral {
  double value;
  double error;
};

// Integrates weight(u) f(u) over [lo, upper limit] in pieces no wider than
// half the turbulence standard deviation, so the density peak is always
// resolved by the Kronrod nodes.
template <typename Weight>
Integral integrate_turbulence(double alpha, double beta, double lo, Weight weight) {
  const double hi = gamma_gamma_upper_limit(alpha, beta, kTailMass);
  if (lo >= hi) return {0.0, 0.0};
  const double sd = std::sqrt((1.0 + 1.0 / alpha) * (1.0 + 1.0 / beta) - 1.0);
  const double width = std::max(0.5 * sd, (hi - lo) / kMaxPieces);
  auto integrand = [&](double u) {
    if (u <= 0.0) return 0.0;
    return weight(u) * gamma_gamma_pdf(u, alpha, beta);
  };
  Integral total{0.0, 0.0};
  for (double a = lo; a < hi; a += width) {
    const double b = std::min(hi, a + width);
    double err = 0.0;
    total.value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        integrand, a, b, kMaxDepth, kRelTolerance, &err);
    total.error += err;
  }
  return total;
}

}  // namespace

void ChannelConfig::validate() const {
  require_positive(kappa_db_per_km, "kappa");
  require_positive(aperture_radius_m, "aperture_radius");
  require_positive(sigma_s_mrad, "sigma_s");
  require_positive(theta_d_mrad, "theta_d");
  require_positive(cn2, "cn2");
  require_positive(wavelength_m, "lambda_fso");
  require_positive(responsivity, "responsivity");
  if (responsivity > 1.0) throw std::invalid_argument("ChannelConfig: responsivity must be <= 1");
  if (!(eta_th > 0.0 && eta_th < 1.0)) {
    throw std::invalid_argument("ChannelConfig: eta_th must lie in (0, 1)");
  }
}

double atmospheric_loss(const ChannelConfig& config, LinkGeometry geom) {
  const double d_km = geom.distance_m / 1000.0;
  return std::pow(10.0, -config.kappa_db_per_km * d_km / 10.0);
}

double rytov_variance(const ChannelConfig& config, LinkGeometry geom) {
  require_distance(geom);
  const double k = 2.0 * std::numbers::pi / config.wavelength_m;
  return 1.23 * config.cn2 * std::pow(k, 7.0 / 6.0) * std::pow(geom.distance_m, 11.0 / 6.0);
}

TurbulenceParams gamma_gamma_params(double rytov_var) {
  if (!(rytov_var > 0.0) || !std::isfinite(rytov_var)) {
    throw std::domain_error("gamma_gamma_params: Rytov variance must be > 0");
  }
  const double s125 = std::pow(rytov_var, 12.0 / 5.0);
  const double alpha_exp = 0.49 * rytov_var / std::pow(1.0 + 1.11 * s125, 7.0 / 6.0);
  const double beta_exp = 0.51 * rytov_var / std::pow(1.0 + 0.69 * s125, 5.0 / 6.0);
  // expm1 keeps the weak-turbulence limit accurate.
  return {rytov_var, 1.0 / std::expm1(alpha_exp), 1.0 / std::expm1(beta_exp)};
}

PointingParams pointing_params(const ChannelConfig& config, LinkGeometry geom) {
  require_distance(geom);
  PointingParams p;
  p.beam_width_m = config.theta_d_mrad * 1e-3 * geom.distance_m;
  p.ratio_v = std::sqrt(std::numbers::pi) * config.aperture_radius_m /
              (std::numbers::sqrt2 * p.beam_width_m);
  const double erf_v = std::erf(p.ratio_v);
  p.max_gain = erf_v * erf_v;
  const double weq2 = p.beam_width_m * p.beam_width_m * std::sqrt(std::numbers::pi) * erf_v /
                      (2.0 * p.ratio_v * std::exp(-p.ratio_v * p.ratio_v));
  p.equiv_beam_width_m = std::sqrt(weq2);
  const double jitter_m = config.jitter_mode == PointingJitterMode::kAngular
                              ? config.sigma_s_mrad * 1e-3 * geom.distance_m
                              : config.sigma_s_mrad * 1e-3;
  p.gamma = p.equiv_beam_width_m / (2.0 * jitter_m);
  return p;
}

LinkChannel characterize(const ChannelConfig& config, LinkGeometry geom) {
  LinkChannel link;
  link.responsivity = config.responsivity;
  link.atmospheric_gain = atmospheric_loss(config, geom);
  link.turbulence = gamma_gamma_params(rytov_variance(config, geom));
  link.pointing = pointing_params(config, geom);
  return link;
}

double gamma_gamma_log_pdf(double u, double alpha, double beta) {
  if (!(u > 0.0)) return -INFINITY;
  const double half_sum = 0.5 * (alpha + beta);
  const double ab = alpha * beta;
  return std::numbers::ln2 + half_sum * std::log(ab) - std::lgamma(alpha) - std::lgamma(beta) +
         (half_sum - 1.0) * std::log(u) + special::log_bessel_k(alpha - beta, 2.0 * std::sqrt(ab * u));
}

double gamma_gamma_pdf(double u, double alpha, double beta) {
  if (!(u > 0.0)) return 0.0;
  return std::exp(gamma_gamma_log_pdf(u, alpha, beta));
}

double gamma_gamma_tail_bound(double t, double alpha, double beta) {
  if (t <= 1.0) return 1.0;
  const double root = std::sqrt(t);
  return std::min(1.0, gamma_tail(root, alpha) + gamma_tail(root, beta));
}

double gamma_gamma_upper_limit(double alpha, double beta, double tail) {
  double t = 2.0;
  while (gamma_gamma_tail_bound(t, alpha, beta) >= tail) t *= 2.0;
  return t;
}

double gamma_gamma_total_mass(double alpha, double beta) {
  return integrate_turbulence(alpha, beta, 0.0, [](double) { return 1.0; }).value;
}

double pointing_exceedance(double z, double max_gain, double gamma) {
  if (z <= 0.0) return 1.0;
  if (z > max_gain) return 0.0;
  return 1.0 - std::pow(z / max_gain, gamma * gamma);
}

double success_probability(const LinkChannel& link, double eta_th) {
  if (eta_th <= 0.0) return 1.0;
  const double scale = link.responsivity * link.atmospheric_gain;
  const double g2 = link.pointing.gamma * link.pointing.gamma;
  // Below u0 the pointing gain would have to exceed A.
  const double u0 = eta_th / (scale * link.pointing.max_gain);
  if (!std::isfinite(u0)) return 0.0;
  const Integral result =
      integrate_turbulence(link.turbulence.alpha, link.turbulence.beta, u0,
                           [&](double u) { return 1.0 - std::pow(u0 / u, g2); });
  if (result.error > kAbsErrorTarget) {
    throw NumericError("success_probability: quadrature error estimate " +
                           std::to_string(result.error) + " exceeds target",
                       result.error);
  }
  return std::clamp(result.value, 0.0, 1.0);
}

double success_probability(const ChannelConfig& config, LinkGeometry geom) {
  return success_probability(characterize(config, geom), config.eta_th);
}

double sample_pointing_gain(const PointingParams& pointing, CounterRng& rng) {
  return pointing.max_gain * std::pow(rng.uniform_open(), 1.0 / (pointing.gamma * pointing.gamma));
}

double sample_turbulence_gain(const TurbulenceParams& turbulence, CounterRng& rng) {
  const double x = rng.gamma(turbulence.alpha) / turbulence.alpha;
  const double y = rng.gamma(turbulence.beta) / turbulence.beta;
  return x * y;
}

double sample_composite_gain(const LinkChannel& link, CounterRng& rng) {
  const double pointing = sample_pointing_gain(link.pointing, rng);
  const double turbulence = sample_turbulence_gain(link.turbulence, rng);
  return link.responsivity * link.atmospheric_gain * pointing * turbulence;
}

double sample_composite_gain(const ChannelConfig& config, LinkGeometry geom, CounterRng& rng) {
  return sample_composite_gain(characterize(config, geom), rng);
}

}  // namespace qnet
