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

#include "qnet/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "qnet/lp.hpp"

namespace qnet {
namespace {

constexpr double kIntegralityTol = 1e-6;

double prune_margin(double incumbent) { return 1e-9 * (1.0 + std::abs(incumbent)); }

struct MilpLayout {
  std::size_t links = 0;
  std::size_t x(std::size_t k) const { return k; }
  std::size_t y(std::size_t k) const { return links + k; }
};

lp::LpProblem build_milp_relaxation(const Scenario& scenario, Connectivity mode) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  const MilpLayout at{nq * nu};
  lp::LpProblem p(2 * at.links);
  for (std::size_t k = 0; k < at.links; ++k) {
    const bool eligible = scenario.links[k].eligible;
    p.objective[at.y(k)] = scenario.links[k].success_probability;
    p.upper[at.x(k)] = eligible ? 1.0 : 0.0;
    if (!eligible) p.upper[at.y(k)] = 0.0;
  }
  std::vector<double> row(2 * at.links);
  auto reset = [&] { std::fill(row.begin(), row.end(), 0.0); };
  for (std::size_t j = 0; j < nu; ++j) {
    if (scenario.rmin[j] <= 0.0) continue;
    reset();
    for (std::size_t n = 0; n < nq; ++n) {
      row[at.y(n * nu + j)] = -scenario.link(n, j).success_probability;
    }
    p.add_row(row, -scenario.rmin[j]);
  }
  for (std::size_t n = 0; n < nq; ++n) {
    reset();
    for (std::size_t j = 0; j < nu; ++j) row[at.y(n * nu + j)] = 1.0;
    p.add_row(row, scenario.rmax[n]);
  }
  for (std::size_t k = 0; k < at.links; ++k) {
    reset();
    row[at.y(k)] = 1.0;
    row[at.x(k)] = -scenario.rmax[k / nu];
    p.add_row(row, 0.0);
  }
  for (std::size_t j = 0; j < nu; ++j) {
    reset();
    for (std::size_t n = 0; n < nq; ++n) row[at.x(n * nu + j)] = 1.0;
    p.add_row(row, connectivity_bound(mode));
  }
  return p;
}

struct Node {
  std::vector<double> lower;
  std::vector<double> upper;
  lp::LpSolution sol;
};

}  // namespace

std::vector<std::vector<std::vector<std::size_t>>> association_choices(const Scenario& scenario,
                                                                       Connectivity mode) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  const int bound = connectivity_bound(mode);
  std::vector<std::vector<std::vector<std::size_t>>> choices(nu);
  for (std::size_t j = 0; j < nu; ++j) {
    std::vector<std::size_t> eligible;
    for (std::size_t n = 0; n < nq; ++n) {
      if (scenario.link(n, j).eligible) eligible.push_back(n);
    }
    auto& out = choices[j];
    if (bound >= 2) {
      for (std::size_t a = 0; a < eligible.size(); ++a) {
        for (std::size_t b = a + 1; b < eligible.size(); ++b) out.push_back({eligible[a], eligible[b]});
      }
    }
    for (std::size_t n : eligible) out.push_back({n});
    if (scenario.rmin[j] <= 0.0) out.push_back({});
  }
  return choices;
}

OracleResult enumerate_optimal(const Scenario& scenario, Connectivity mode,
                               std::uint64_t max_combinations) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  const auto choices = association_choices(scenario, mode);

  OracleResult result;
  result.x.assign(nq * nu, 0.0);
  result.r.assign(nq * nu, 0.0);
  std::uint64_t total = 1;
  for (const auto& c : choices) {
    if (c.empty()) return result;  // a QU with demand and no eligible QBS
    if (total > max_combinations / c.size()) {
      throw InstanceTooLarge("enumerate_optimal: more than " + std::to_string(max_combinations) +
                             " association combinations");
    }
    total *= c.size();
  }

  std::vector<std::size_t> pick(nu, 0);
  Matrix x(nq * nu, 0.0);
  std::vector<double> best_s(nq);
  for (std::uint64_t combo = 0; combo < total; ++combo) {
    std::fill(x.begin(), x.end(), 0.0);
    std::fill(best_s.begin(), best_s.end(), 0.0);
    for (std::size_t j = 0; j < nu; ++j) {
      for (std::size_t n : choices[j][pick[j]]) {
        x[n * nu + j] = 1.0;
        best_s[n] = std::max(best_s[n], scenario.link(n, j).success_probability);
      }
    }
    double bound = 0.0;
    for (std::size_t n = 0; n < nq; ++n) bound += scenario.rmax[n] * best_s[n];

    if (result.feasible && bound <= result.objective + prune_margin(result.objective)) {
      ++result.pruned;
    } else {
      ++result.evaluated;
      const RateResult rates = solve_rate_subproblem(scenario, x);
      if (rates.status == lp::LpStatus::kOptimal &&
          (!result.feasible || rates.objective > result.objective)) {
        result.feasible = true;
        result.objective = rates.objective;
        result.x = x;
        result.r = rates.r;
      }
    }
    for (std::size_t j = 0; j < nu; ++j) {
      if (++pick[j] < choices[j].size()) break;
      pick[j] = 0;
    }
  }
  return result;
}

double milp_relaxation_bound(const Scenario& scenario, Connectivity mode) {
  const lp::LpSolution sol = lp::solve(build_milp_relaxation(scenario, mode));
  if (sol.status != lp::LpStatus::kOptimal) return -std::numeric_limits<double>::infinity();
  return sol.objective_value;
}

OracleResult milp_reference(const Scenario& scenario, Connectivity mode, std::uint64_t max_nodes) {
  const std::size_t links = scenario.n_qbs() * scenario.n_qu();
  const MilpLayout at{links};
  lp::LpProblem p = build_milp_relaxation(scenario, mode);

  OracleResult result;
  result.x.assign(links, 0.0);
  result.r.assign(links, 0.0);

  auto evaluate = [&](Node& node) {
    if (++result.evaluated > max_nodes) {
      throw InstanceTooLarge("milp_reference: node budget of " + std::to_string(max_nodes) +
                             " exceeded");
    }
    p.lower = node.lower;
    p.upper = node.upper;
    node.sol = lp::solve(p);
    return node.sol.status == lp::LpStatus::kOptimal;
  };
  auto dominated = [&](const Node& node) {
    return result.feasible &&
           node.sol.objective_value <= result.objective + prune_margin(result.objective);
  };

  std::vector<Node> stack;
  Node root{p.lower, p.upper, {}};
  if (evaluate(root)) stack.push_back(std::move(root));

  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    if (dominated(node)) {
      ++result.pruned;
      continue;
    }
    std::optional<std::size_t> branch;
    double closest = 1.0;
    for (std::size_t k = 0; k < links; ++k) {
      const double v = node.sol.z[at.x(k)];
      const double frac = v - std::floor(v);
      if (frac <= kIntegralityTol || frac >= 1.0 - kIntegralityTol) continue;
      const double distance = std::abs(frac - 0.5);
      if (distance < closest) {
        closest = distance;
        branch = k;
      }
    }
    if (!branch) {
      result.feasible = true;
      result.objective = node.sol.objective_value;
      for (std::size_t k = 0; k < links; ++k) {
        result.x[k] = std::round(node.sol.z[at.x(k)]);
        result.r[k] = std::max(0.0, node.sol.z[at.y(k)]);
      }
      continue;
    }
    Node down{node.lower, node.upper, {}};
    Node up{node.lower, node.upper, {}};
    down.upper[at.x(*branch)] = 0.0;
    up.lower[at.x(*branch)] = 1.0;
    const bool down_ok = evaluate(down);
    const bool up_ok = evaluate(up);
    // The child with the better bound is pushed last so it is explored first.
    if (down_ok && up_ok) {
      if (up.sol.objective_value >= down.sol.objective_value) {
        stack.push_back(std::move(down));
        stack.push_back(std::move(up));
      } else {
        stack.push_back(std::move(up));
        stack.push_back(std::move(down));
      }
    } else if (down_ok) {
      stack.push_back(std::move(down));
    } else if (up_ok) {
      stack.push_back(std::move(up));
    }
  }
  return result;
}

}  // namespace qnet
