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

#ifndef QNET_AO_OPTIMIZER_HPP
#define QNET_AO_OPTIMIZER_HPP

#include <span>
#include <string>
#include <vector>

#include "qnet/association.hpp"
#include "qnet/lp.hpp"
#include "qnet/scenario.hpp"

namespace qnet {

struct AoConfig {
  int max_outer_iters = 30;
  double outer_tol = 1e-4;     // relative objective change
  double penalty_lambda = 0.0;  // 0 selects 10 * max(r s + 1)
  double lambda_growth = 10.0;
  int max_escalations = 5;
  int max_mm_iters = 50;
  double mm_tol = 1e-6;
  double binarize_threshold = 0.5;
  Connectivity mode = Connectivity::kDual;

  void validate() const;
};

/// Each QU takes its bound-many eligible QBSs of largest s, skipping QBSs
/// whose load would exceed Rmax when the QU's demand is split equally. A QU
/// whose every candidate is skipped still takes its best link.
Matrix greedy_association(const Scenario& scenario, Connectivity mode);

/// Rates from the rate LP with every eligible link active (connectivity
/// bound dropped); stands in for r when the current association admits no
/// feasible rates.
RateResult relaxed_rates(const Scenario& scenario);

/// Penalized, linearized association LP over all N x U links (row-major).
/// Objective sum x r s - lambda sum x + lambda sum (2 x x_prev - x_prev^2).
lp::LpProblem build_association_lp(const Scenario& scenario, std::span<const double> r,
                                   std::span<const double> x_prev, double lambda,
                                   Connectivity mode);

struct MmResult {
  Matrix x;        // rounded and repaired
  Matrix relaxed;  // last LP iterate before rounding
  bool fractional = false;
  bool lp_failed = false;
  double lambda = 0.0;
  double fractional_norm = 0.0;  // max min(x, 1 - x) of the relaxed iterate
  int iterations = 0;
  int escalations = 0;
  std::vector<double> surrogate;  // LP optimum per MM iteration
  std::vector<int> surrogate_phase;  // escalation index of each entry
};

MmResult solve_association_mm(const Scenario& scenario, std::span<const double> r,
                              const AoConfig& config, std::span<const double> x_init);

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;  // NaN when the iterate's rate LP is infeasible
  bool feasible = false;
  double lambda = 0.0;           // penalty used by the association step that follows
  double fractional_norm = 0.0;  // of that step's relaxed iterate
};

struct AoSolution {
  Matrix x;
  Matrix r;
  double objective = 0.0;
  std::vector<TraceRecord> trace;
  bool feasible = false;
  bool converged = false;
  int iterations = 0;
  std::string diagnostics;
};

AoSolution alternating_optimize(const Scenario& scenario, const AoConfig& config);

}  // namespace qnet

#endif  // QNET_AO_OPTIMIZER_HPP
