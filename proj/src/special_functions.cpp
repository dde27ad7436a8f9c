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

#include "qnet/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qnet::special {
namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxTerms = 10000;

// Taylor coefficients of 1/Gamma(z) about 0, index k -> z^k.
constexpr std::array<double, 28> kRecipGamma = {
    0.0,
    1.0,
    0.57721566490153286,
    -0.65587807152025388,
    -0.042002635034095236,
    0.16653861138229149,
    -0.042197734555544337,
    -0.0096219715278769736,
    0.0072189432466630995,
    -0.0011651675918590651,
    -0.00021524167411495097,
    0.00012805028238811619,
    -2.0134854780788239e-5,
    -1.2504934821426707e-6,
    1.1330272319816959e-6,
    -2.0563384169776071e-7,
    6.1160951044814158e-9,
    5.0020076444692229e-9,
    -1.1812745704870201e-9,
    1.0434267116911005e-10,
    7.7822634399050713e-12,
    -3.6968056186422057e-12,
    5.100370287454476e-13,
    -2.0583260535665068e-14,
    -5.348122539423018e-15,
    1.2267786282382608e-15,
    -1.1812593016974588e-16,
    1.1866922547516003e-18,
};

struct TemmeGammas {
  double gam1;    // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;    // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;   // 1/G(1+mu)
  double gammi;   // 1/G(1-mu)
};

// 1/G(1+mu) = sum_k c_k mu^(k-1); splitting into even and odd powers gives
// gam1 and gam2 without cancellation at mu -> 0.
TemmeGammas temme_gammas(double mu) {
  const double mu2 = mu * mu;
  double sym = 0.0;   // odd k: c_k mu^(k-1)
  double anti = 0.0;  // even k: c_k mu^(k-2)
  double p = 1.0;
  for (std::size_t k = 1; k < kRecipGamma.size(); k += 2) {
    sym += kRecipGamma[k] * p;
    if (k + 1 < kRecipGamma.size()) anti += kRecipGamma[k + 1] * p;
    p *= mu2;
  }
  TemmeGammas g{};
  g.gam1 = -anti;
  g.gam2 = sym;
  g.gampl = sym + mu * anti;
  g.gammi = sym - mu * anti;
  return g;
}

// K_mu(x) and K_{mu+1}(x) for |mu| <= 1/2, returned as mantissas times
// exp(log_scale).
struct KPair {
  double k_mu;
  double k_mu1;
  double log_scale;
};

KPair small_argument(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  int i = 1;
  for (; i <= kMaxTerms; ++i) {
    const double di = i;
    ff = (di * ff + p + q) / (di * di - mu2);
    c *= d / di;
    p /= di - mu;
    q /= di + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - di * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  if (i > kMaxTerms) throw std::runtime_error("bessel_k: series did not converge");
  return {sum, sum1 * 2.0 / x, 0.0};
}

KPair large_argument(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 1;
  for (; i <= kMaxTerms; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  if (i > kMaxTerms) throw std::runtime_error("bessel_k: continued fraction did not converge");
  h *= a1;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1, -x};
}

}  // namespace

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x) || !std::isfinite(nu)) {
    throw std::domain_error("bessel_k: requires finite nu and x > 0, got x = " +
                            std::to_string(x));
  }
  nu = std::abs(nu);
  const int steps = static_cast<int>(nu + 0.5);
  const double mu = nu - steps;
  KPair k = x < 2.0 ? small_argument(mu, x) : large_argument(mu, x);
  double lo = k.k_mu;
  double hi = k.k_mu1;
  double log_scale = k.log_scale;
  for (int i = 1; i <= steps; ++i) {
    const double next = (mu + i) * (2.0 / x) * hi + lo;
    lo = hi;
    hi = next;
    if (hi > 1e250) {
      lo *= 1e-250;
      hi *= 1e-250;
      log_scale += 250.0 * std::numbers::ln10;
    }
  }
  return log_scale + std::log(lo);
}

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

}  // namespace qnet::special
