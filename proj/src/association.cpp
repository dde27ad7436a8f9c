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

#include "qnet/association.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qnet {

std::string to_string(Connectivity mode) { return mode == Connectivity::kDual ? "DC" : "SC"; }

double total_rate(const Scenario& scenario, std::span<const double> x, std::span<const double> r) {
  double total = 0.0;
  for (std::size_t k = 0; k < scenario.links.size(); ++k) {
    total += x[k] * r[k] * scenario.links[k].success_probability;
  }
  return total;
}

double ConstraintResiduals::max() const {
  return std::max({min_rate, fidelity, capacity, connectivity, binary, nonnegative});
}

ConstraintResiduals check_solution(const Scenario& scenario, std::span<const double> x,
                                   std::span<const double> r, Connectivity mode) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  if (x.size() != nq * nu || r.size() != nq * nu) {
    throw std::invalid_argument("check_solution: matrix size does not match the scenario");
  }
  const auto mask = eligibility_mask(scenario);
  ConstraintResiduals res;
  double rmax_scale = 1.0;
  for (double v : scenario.rmax) rmax_scale = std::max(rmax_scale, v);
  for (std::size_t j = 0; j < nu; ++j) {
    double delivered = 0.0;
    double links = 0.0;
    for (std::size_t n = 0; n < nq; ++n) {
      const std::size_t k = n * nu + j;
      delivered += x[k] * r[k] * scenario.links[k].success_probability;
      links += x[k];
    }
    res.min_rate = std::max(res.min_rate, (scenario.rmin[j] - delivered) / (1.0 + scenario.rmin[j]));
    res.connectivity = std::max(res.connectivity, links - connectivity_bound(mode));
  }
  for (std::size_t n = 0; n < nq; ++n) {
    double load = 0.0;
    for (std::size_t j = 0; j < nu; ++j) load += x[n * nu + j] * r[n * nu + j];
    res.capacity = std::max(res.capacity, (load - scenario.rmax[n]) / (1.0 + scenario.rmax[n]));
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0 && !mask[k]) res.fidelity = 1.0;
    res.binary = std::max(res.binary, std::abs(x[k] - std::round(x[k])));
    res.nonnegative = std::max(res.nonnegative, -r[k] / rmax_scale);
  }
  return res;
}

RateResult solve_rate_subproblem(const Scenario& scenario, std::span<const double> x) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  if (x.size() != nq * nu) throw std::invalid_argument("solve_rate_subproblem: bad association size");

  std::vector<std::size_t> active;  // link index per LP variable
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.5) active.push_back(k);
  }
  lp::LpProblem p(active.size());
  for (std::size_t v = 0; v < active.size(); ++v) {
    p.objective[v] = scenario.links[active[v]].success_probability;
  }
  std::vector<double> row(active.size());
  for (std::size_t j = 0; j < nu; ++j) {
    if (scenario.rmin[j] <= 0.0) continue;
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t v = 0; v < active.size(); ++v) {
      if (active[v] % nu == j) row[v] = -scenario.links[active[v]].success_probability;
    }
    p.add_row(row, -scenario.rmin[j]);
  }
  for (std::size_t n = 0; n < nq; ++n) {
    std::fill(row.begin(), row.end(), 0.0);
    bool any = false;
    for (std::size_t v = 0; v < active.size(); ++v) {
      if (active[v] / nu == n) {
        row[v] = 1.0;
        any = true;
      }
    }
    if (any) p.add_row(row, scenario.rmax[n]);
  }

  RateResult result;
  result.r.assign(nq * nu, 0.0);
  const lp::LpSolution sol = lp::solve(p);
  result.status = sol.status;
  if (sol.status != lp::LpStatus::kOptimal) return result;
  for (std::size_t v = 0; v < active.size(); ++v) result.r[active[v]] = std::max(0.0, sol.z[v]);
  result.objective = sol.objective_value;
  return result;
}

}  // namespace qnet
