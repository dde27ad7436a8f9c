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

#ifndef QNET_EXACT_ORACLE_HPP
#define QNET_EXACT_ORACLE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qnet/association.hpp"
#include "qnet/scenario.hpp"

namespace qnet {

class InstanceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleResult {
  bool feasible = false;
  double objective = 0.0;
  Matrix x;
  Matrix r;
  std::uint64_t evaluated = 0;  // rate LPs or B&B nodes solved
  std::uint64_t pruned = 0;
};

/// Per-QU subsets of eligible QBSs, sizes 0..bound; the empty subset is
/// omitted when the QU has a positive minimum rate.
std::vector<std::vector<std::vector<std::size_t>>> association_choices(const Scenario& scenario,
                                                                       Connectivity mode);

/// Exhaustive search over per-QU association choices, one rate LP each.
/// Throws InstanceTooLarge when the choice product exceeds max_combinations.
OracleResult enumerate_optimal(const Scenario& scenario, Connectivity mode,
                               std::uint64_t max_combinations = 1000000);

/// Big-M MILP (y = x r, y <= Rmax x) solved by depth-first branch and bound.
/// Throws InstanceTooLarge past max_nodes.
OracleResult milp_reference(const Scenario& scenario, Connectivity mode,
                            std::uint64_t max_nodes = 1000000);

/// Root LP relaxation value of the MILP; -inf when infeasible.
double milp_relaxation_bound(const Scenario& scenario, Connectivity mode);

}  // namespace qnet

#endif  // QNET_EXACT_ORACLE_HPP
