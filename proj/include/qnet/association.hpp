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

#ifndef QNET_ASSOCIATION_HPP
#define QNET_ASSOCIATION_HPP

#include <span>
#include <string>
#include <vector>

#include "qnet/lp.hpp"
#include "qnet/scenario.hpp"

namespace qnet {

/// DC lets a QU associate with up to two QBSs, SC with one.
enum class Connectivity { kDual, kSingle };

constexpr int connectivity_bound(Connectivity mode) noexcept {
  return mode == Connectivity::kDual ? 2 : 1;
}

std::string to_string(Connectivity mode);

/// Association x and rates r share the scenario's row-major N x U layout.
using Matrix = std::vector<double>;

/// sum x r s over all links.
double total_rate(const Scenario& scenario, std::span<const double> x, std::span<const double> r);

/// Scaled constraint residuals of a candidate (x, r); all zero when feasible.
struct ConstraintResiduals {
  double min_rate = 0.0;      // C1: max_j (Rmin_j - sum_n x r s) / (1 + Rmin_j)
  double fidelity = 0.0;      // C2: 1 if any associated link is ineligible
  double capacity = 0.0;      // C3: max_n (sum_j x r - Rmax_n) / (1 + Rmax_n)
  double connectivity = 0.0;  // C4: max_j sum_n x - bound
  double binary = 0.0;        // C5: max |x - round(x)|
  double nonnegative = 0.0;   // C6: max(-r) / (1 + max Rmax)

  double max() const;
};

ConstraintResiduals check_solution(const Scenario& scenario, std::span<const double> x,
                                   std::span<const double> r, Connectivity mode);

struct RateResult {
  lp::LpStatus status = lp::LpStatus::kInfeasible;
  Matrix r;
  double objective = 0.0;
};

/// Rates for a fixed binary association: maximize sum x r s subject to the
/// per-QU minimum rate, per-QBS capacity and r >= 0. Links with x = 0 keep
/// r = 0. Infeasibility is reported through the status.
RateResult solve_rate_subproblem(const Scenario& scenario, std::span<const double> x);

}  // namespace qnet

#endif  // QNET_ASSOCIATION_HPP
