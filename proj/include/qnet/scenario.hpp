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

#ifndef QNET_SCENARIO_HPP
#define QNET_SCENARIO_HPP

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnet/fidelity.hpp"
#include "qnet/fso_channel.hpp"

namespace qnet {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class InfeasiblePolicy { kResample, kReport };

struct ScenarioConfig {
  double area_side_m = 600.0;
  int n_qbs = 10;
  int n_qu = 20;
  Range distance_m{150.0, 550.0};
  Range rmax{5e6, 1e7};  // pairs/s
  Range rmin{2e3, 4e3};  // pairs/s
  Range fmin{0.8, 0.95};
  std::uint64_t seed = 1;
  ChannelConfig channel;
  FidelityConfig fidelity;
  int max_placement_attempts = 10000;
  InfeasiblePolicy infeasible_policy = InfeasiblePolicy::kResample;
  int max_snapshot_retries = 100;

  void validate() const;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b);

struct LinkStats {
  double distance_m = 0.0;
  double success_probability = 0.0;
  double fidelity = 0.0;
  bool eligible = false;
};

/// Row-major N x U matrix of links; link(n, j) is QBS n to QU j.
struct Scenario {
  std::uint64_t seed = 0;
  std::vector<Point> qbs;
  std::vector<Point> qu;
  std::vector<double> rmax;
  std::vector<double> rmin;
  std::vector<double> fmin;
  std::vector<LinkStats> links;
  std::vector<int> placement_attempts;  // per QU

  std::size_t n_qbs() const noexcept { return rmax.size(); }
  std::size_t n_qu() const noexcept { return rmin.size(); }
  LinkStats& link(std::size_t n, std::size_t j) { return links[n * n_qu() + j]; }
  const LinkStats& link(std::size_t n, std::size_t j) const { return links[n * n_qu() + j]; }
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fills distance, s and F for every link from the positions, then sets
/// eligibility. OpenMP over links.
void compute_links(Scenario& scenario, const ChannelConfig& channel, const FidelityConfig& fidelity);

/// Single-threaded reference for compute_links.
void compute_links_serial(Scenario& scenario, const ChannelConfig& channel,
                          const FidelityConfig& fidelity);

/// Recomputes LinkStats::eligible from the stored fidelities and fmin.
void refresh_eligibility(Scenario& scenario);

/// One snapshot from config.seed. QBSs are uniform over the square; each
/// QU is rejection-sampled until every QBS distance lies in the configured
/// range. Throws GenerationError if a QU exhausts its attempt budget.
Scenario generate(const ScenarioConfig& config);

/// Row-major N x U mask: F(n, j) >= fmin(j).
std::vector<bool> eligibility_mask(const Scenario& scenario);

struct FeasibilityReport {
  bool feasible = true;
  std::string reason;
  int qu = -1;  // offending QU when the reason is per-user
};

/// Necessary-condition screen; true feasibility is decided by the LP.
FeasibilityReport is_potentially_feasible(const Scenario& scenario);

struct GeneratedSnapshot {
  Scenario scenario;
  FeasibilityReport screen;
  int rejected = 0;  // snapshots discarded before this one
};

/// Applies the infeasible-snapshot policy: kResample redraws from
/// derive_seed(seed, k) until the screen passes (GenerationError after
/// max_snapshot_retries); kReport returns the first draw with its screen.
GeneratedSnapshot generate_snapshot(const ScenarioConfig& config);

/// Flat text, one record per entity:
///   qnet-scenario 1
///   scenario <seed> <n_qbs> <n_qu>
///   qbs <n> <x> <y> <rmax>
///   qu <j> <x> <y> <rmin> <fmin> <placement_attempts>
///   link <n> <j> <distance_m> <s> <fidelity> <eligible>
void write_scenario(std::ostream& out, const Scenario& scenario);
Scenario read_scenario(std::istream& in);

}  // namespace qnet

#endif  // QNET_SCENARIO_HPP
