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

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "qnet/fso_channel.hpp"
#include "qnet/monte_carlo.hpp"

using namespace qnet;

namespace {

// Reference values from an mpmath script (30 digits) evaluating the channel
// formulas directly; success probabilities use the Meijer-G closed form.
struct LinkFixture {
  double d;
  double gain_l;
  double rytov;
  double alpha;
  double beta;
  double max_gain;
  double gamma;
  double s_meijer;
};

constexpr LinkFixture kLinks[] = {
    {150, 0.9852580683, 0.03072783456, 65.9373057086, 63.3212489759, 0.08298257985, 4.092364184, 0.971257733391},
    {250, 0.9755510484, 0.07838891685, 25.6125300364, 24.5487825697, 0.03074447726, 4.032913056, 0.00840221097004},
    {300, 0.9707334612, 0.1095015537, 18.2612956945, 17.4620445189, 0.02145674905, 4.022816262, 0.000491796390355},
    {350, 0.9659396647, 0.1452633523, 13.7325523844, 13.0799347324, 0.01581154921, 4.01674527, 5.56158687816e-5},
    {450, 0.9564229748, 0.2302789583, 8.71057782106, 8.16849694404, 0.009596524505, 4.010118159, 3.37986368688e-6},
    {500, 0.9516998481, 0.2793463422, 7.26160299925, 6.71934481243, 0.00778063337, 4.008192955, 1.35987289405e-6},
    {550, 0.9470000458, 0.3326822104, 6.21663850448, 5.64798539667, 0.006434835431, 4.006769354, 6.50196048084e-7},
};

LinkGeometry at(double d) { return LinkGeometry{d}; }

}  // namespace

TEST_CASE("atmospheric loss") {
  ChannelConfig cfg;
  CHECK(atmospheric_loss(cfg, at(0.0)) == 1.0);
  CHECK(atmospheric_loss(cfg, at(500.0)) == doctest::Approx(0.9516998481129437).epsilon(1e-12));
  cfg.kappa_db_per_km = 10.0;
  CHECK(atmospheric_loss(cfg, at(1000.0)) == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("Rytov variance") {
  const ChannelConfig cfg;
  CHECK(rytov_variance(cfg, at(500.0)) == doctest::Approx(0.27934634215051655).epsilon(1e-12));
  CHECK(rytov_variance(cfg, at(1e-9)) < 1e-14);
  const double ratio = rytov_variance(cfg, at(640.0)) / rytov_variance(cfg, at(320.0));
  CHECK(ratio == doctest::Approx(std::pow(2.0, 11.0 / 6.0)).epsilon(1e-13));
  ChannelConfig stronger = cfg;
  stronger.cn2 = 1e-13;
  CHECK(rytov_variance(stronger, at(500.0)) > rytov_variance(cfg, at(500.0)));
  CHECK_THROWS_AS(rytov_variance(cfg, at(0.0)), std::domain_error);
  CHECK_THROWS_AS(rytov_variance(cfg, at(-3.0)), std::domain_error);
}

TEST_CASE("Gamma-Gamma shape parameters") {
  struct Case {
    double s2, alpha, beta;
  };
  for (const Case c : {Case{1.0, 4.3938590253921471, 2.5636319795036948},
                       Case{0.278, 7.2939172017760291, 6.7520205785197323},
                       Case{0.01, 203.58622963028554, 195.58064325624699},
                       Case{5.0, 42.192176890388235, 6.8897222325932199}}) {
    const TurbulenceParams p = gamma_gamma_params(c.s2);
    CHECK(p.alpha == doctest::Approx(c.alpha).epsilon(1e-6));
    CHECK(p.beta == doctest::Approx(c.beta).epsilon(1e-6));
  }
  for (const auto& f : kLinks) {
    const TurbulenceParams p = gamma_gamma_params(f.rytov);
    CHECK(p.alpha == doctest::Approx(f.alpha).epsilon(1e-6));
    CHECK(p.beta == doctest::Approx(f.beta).epsilon(1e-6));
  }
  CHECK_THROWS_AS(gamma_gamma_params(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_gamma_params(-0.1), std::domain_error);

  const TurbulenceParams weak = gamma_gamma_params(1e-8);
  CHECK(weak.alpha > 1e7);
  CHECK(weak.beta > 1e7);
}

TEST_CASE("alpha and beta decrease with turbulence strength up to the saturation turnaround") {
  TurbulenceParams prev = gamma_gamma_params(0.005);
  for (double s2 = 0.01; s2 <= 0.74; s2 += 0.01) {
    const TurbulenceParams p = gamma_gamma_params(s2);
    CHECK(p.alpha < prev.alpha);
    CHECK(p.beta < prev.beta);
    prev = p;
  }
  // Past the minimum the far-field expressions rise again.
  CHECK(gamma_gamma_params(5.0).alpha > gamma_gamma_params(1.0).alpha);
}

TEST_CASE("pointing parameters") {
  ChannelConfig cfg;
  const PointingParams p = pointing_params(cfg, at(500.0));
  CHECK(p.beam_width_m == doctest::Approx(4.0));
  CHECK(p.ratio_v == doctest::Approx(0.078332133582218766).epsilon(1e-12));
  CHECK(p.max_gain == doctest::Approx(0.0077806333703743095).epsilon(1e-12));
  CHECK(p.equiv_beam_width_m == doctest::Approx(4.0081929553159833).epsilon(1e-12));
  CHECK(p.gamma == doctest::Approx(4.0081929553159833).epsilon(1e-12));

  // v = 1: a = sqrt(2) w / sqrt(pi).
  ChannelConfig unit = cfg;
  const double w = unit.theta_d_mrad * 1e-3 * 100.0;
  unit.aperture_radius_m = std::numbers::sqrt2 * w / std::sqrt(std::numbers::pi);
  const PointingParams q = pointing_params(unit, at(100.0));
  CHECK(q.ratio_v == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(q.max_gain == doctest::Approx(0.71014462643807821).epsilon(1e-12));

  ChannelConfig tiny = cfg;
  tiny.aperture_radius_m = 1e-9;
  CHECK(pointing_params(tiny, at(300.0)).max_gain < 1e-18);

  ChannelConfig metric = cfg;
  metric.jitter_mode = PointingJitterMode::kMetric;
  CHECK(pointing_params(metric, at(500.0)).gamma ==
        doctest::Approx(2004.0964776579916).epsilon(1e-12));

  for (const auto& f : kLinks) {
    const PointingParams pp = pointing_params(cfg, at(f.d));
    CHECK(pp.max_gain == doctest::Approx(f.max_gain).epsilon(1e-8));
    CHECK(pp.gamma == doctest::Approx(f.gamma).epsilon(1e-8));
    CHECK(pp.max_gain > 0.0);
    CHECK(pp.max_gain < 1.0);
  }
}

TEST_CASE("Gamma-Gamma density") {
  CHECK(gamma_gamma_pdf(1.0, 4.3938590253921471, 2.5636319795036946) ==
        doctest::Approx(0.47498604103907182).epsilon(1e-10));
  CHECK(gamma_gamma_pdf(0.3, 4.3938590253921471, 2.5636319795036946) ==
        doctest::Approx(0.79024512862114567).epsilon(1e-10));
  CHECK(gamma_gamma_pdf(1.2, 65.9373057086, 63.3212489759) ==
        doctest::Approx(1.0342802995454961).epsilon(1e-10));
  CHECK(gamma_gamma_pdf(2.5, 7.26160299925, 6.71934481243) ==
        doctest::Approx(0.04134357904386194).epsilon(1e-10));
  CHECK(gamma_gamma_pdf(0.0, 3.0, 2.0) == 0.0);
}

TEST_CASE("Gamma-Gamma density integrates to one") {
  for (double s2 : {0.03, 0.1, 0.28, 0.6, 1.0, 3.0}) {
    const TurbulenceParams p = gamma_gamma_params(s2);
    CAPTURE(s2);
    CHECK(std::abs(gamma_gamma_total_mass(p.alpha, p.beta) - 1.0) < 1e-4);
  }
  // alpha - beta exactly integral.
  CHECK(std::abs(gamma_gamma_total_mass(5.0, 3.0) - 1.0) < 1e-4);
  // min(alpha, beta) < 1 puts an integrable singularity at the origin.
  CHECK(std::abs(gamma_gamma_total_mass(4.0, 0.8) - 1.0) < 1e-4);
}

TEST_CASE("tail bound and upper limit") {
  CHECK(gamma_gamma_tail_bound(0.5, 5.0, 5.0) == 1.0);
  const double hi = gamma_gamma_upper_limit(7.0, 6.0, 1e-8);
  CHECK(gamma_gamma_tail_bound(hi, 7.0, 6.0) < 1e-8);
  CHECK(gamma_gamma_tail_bound(hi / 2, 7.0, 6.0) >= 1e-8);
}

TEST_CASE("pointing exceedance") {
  CHECK(pointing_exceedance(-1.0, 0.5, 2.0) == 1.0);
  CHECK(pointing_exceedance(0.0, 0.5, 2.0) == 1.0);
  CHECK(pointing_exceedance(0.6, 0.5, 2.0) == 0.0);
  CHECK(pointing_exceedance(0.5, 0.5, 2.0) == 0.0);
  CHECK(pointing_exceedance(0.25, 0.5, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("success probability matches the Meijer-G closed form") {
  const ChannelConfig cfg;
  for (const auto& f : kLinks) {
    CAPTURE(f.d);
    const double s = success_probability(cfg, at(f.d));
    CHECK(s == doctest::Approx(f.s_meijer).epsilon(1e-6));
  }
}

TEST_CASE("success probability limits") {
  const ChannelConfig cfg;
  const LinkChannel link = characterize(cfg, at(300.0));
  CHECK(success_probability(link, 0.0) == 1.0);
  CHECK(success_probability(link, 1e3) == 0.0);
  CHECK(success_probability(link, 1.0) < 1e-12);
}

TEST_CASE("success probability is non-increasing in distance and threshold") {
  ChannelConfig cfg;
  double prev = 1.0;
  for (int i = 0; i <= 8; ++i) {
    const double d = 150.0 + 50.0 * i;
    const double s = success_probability(cfg, at(d));
    CHECK(s <= prev);
    CHECK(s >= 0.0);
    prev = s;
  }
  const LinkChannel link = characterize(cfg, at(200.0));
  prev = 1.0;
  for (double eta = 0.005; eta <= 0.2; eta += 0.005) {
    const double s = success_probability(link, eta);
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("sampled pointing gain moments and support") {
  const ChannelConfig cfg;
  const LinkChannel link = characterize(cfg, at(500.0));
  const PointingParams& p = link.pointing;
  CounterRng rng = CounterRng::stream(42, StreamPurpose::kTest);
  const int n = 1000000;
  double sum = 0.0;
  double sum2 = 0.0;
  double max_seen = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_pointing_gain(p, rng);
    sum += g;
    sum2 += g * g;
    max_seen = std::max(max_seen, g);
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  const double g2 = p.gamma * p.gamma;
  CHECK(std::abs(mean - p.max_gain * g2 / (g2 + 1.0)) <= 3.0 * se);
  CHECK(max_seen <= p.max_gain);
}

TEST_CASE("sampled turbulence gain has unit mean") {
  const TurbulenceParams t = gamma_gamma_params(0.28);
  CounterRng rng = CounterRng::stream(7, StreamPurpose::kTest);
  const int n = 1000000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = sample_turbulence_gain(t, rng);
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - 1.0) <= 3.0 * se);
  // Second moment of the product of unit-mean Gammas.
  const double m2 = (1.0 + 1.0 / t.alpha) * (1.0 + 1.0 / t.beta);
  CHECK(sum2 / n == doctest::Approx(m2).epsilon(0.01));
}

TEST_CASE("composite draws respect the pointing bound") {
  const ChannelConfig cfg;
  const LinkChannel link = characterize(cfg, at(250.0));
  CounterRng rng = CounterRng::stream(3, StreamPurpose::kTest);
  CounterRng twin = rng;
  for (int i = 0; i < 20000; ++i) {
    const double g = sample_composite_gain(link, rng);
    const double gp = sample_pointing_gain(link.pointing, twin);
    const double gf = sample_turbulence_gain(link.turbulence, twin);
    CHECK(g >= 0.0);
    CHECK(g == doctest::Approx(link.responsivity * link.atmospheric_gain * gp * gf));
    CHECK(gp <= link.pointing.max_gain);
  }
}

TEST_CASE("quadrature agrees with sampling at a mid-range link") {
  const ChannelConfig cfg;
  for (double d : {150.0, 250.0}) {
    const LinkChannel link = characterize(cfg, at(d));
    const MonteCarloEstimate mc = estimate_success_probability(
        link, cfg.eta_th, 1000000, CounterRng::stream(11, StreamPurpose::kChannelSampling));
    const double s = success_probability(link, cfg.eta_th);
    CHECK(std::abs(s - mc.mean) <= 3.0 * mc.std_error + 1e-3);
  }
}

TEST_CASE("parallel sampling kernel equals the serial reference") {
  const ChannelConfig cfg;
  const LinkChannel link = characterize(cfg, at(200.0));
  const CounterRng stream = CounterRng::stream(5, StreamPurpose::kChannelSampling);
  for (std::uint64_t n : {std::uint64_t{1}, kMonteCarloBlock - 1, kMonteCarloBlock,
                          3 * kMonteCarloBlock + 17}) {
    const auto par = estimate_success_probability(link, cfg.eta_th, n, stream);
    const auto ser = estimate_success_probability_serial(link, cfg.eta_th, n, stream);
    CHECK(par.mean == ser.mean);
    CHECK(par.std_error == ser.std_error);
    CHECK(par.samples == n);
  }
}

TEST_CASE("config validation") {
  ChannelConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.responsivity = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ChannelConfig{};
  cfg.eta_th = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ChannelConfig{};
  cfg.cn2 = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
