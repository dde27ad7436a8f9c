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

#include "qnet/ao_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace qnet {
namespace {

constexpr double kBinaryTol = 1e-6;

void check_size(const Scenario& scenario, std::span<const double> m, const char* what) {
  if (m.size() != scenario.n_qbs() * scenario.n_qu()) {
    throw std::invalid_argument(std::string(what) + ": matrix size does not match the scenario");
  }
}

double fractional_norm(std::span<const double> x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, std::min(std::abs(v), std::abs(1.0 - v)));
  return worst;
}

// Thresholds x, then trims each QU to its bound-many largest r s links.
Matrix round_and_repair(const Scenario& scenario, std::span<const double> relaxed,
                        std::span<const double> r, const AoConfig& config) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  const auto bound = static_cast<std::size_t>(connectivity_bound(config.mode));
  Matrix x(relaxed.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (relaxed[k] >= config.binarize_threshold && scenario.links[k].eligible) x[k] = 1.0;
  }
  std::vector<std::size_t> on;
  for (std::size_t j = 0; j < nu; ++j) {
    on.clear();
    for (std::size_t n = 0; n < nq; ++n) {
      if (x[n * nu + j] > 0.5) on.push_back(n);
    }
    if (on.size() <= bound) continue;
    std::stable_sort(on.begin(), on.end(), [&](std::size_t a, std::size_t b) {
      const std::size_t ka = a * nu + j;
      const std::size_t kb = b * nu + j;
      return r[ka] * scenario.links[ka].success_probability >
             r[kb] * scenario.links[kb].success_probability;
    });
    for (std::size_t i = bound; i < on.size(); ++i) x[on[i] * nu + j] = 0.0;
  }
  return x;
}

}  // namespace

void AoConfig::validate() const {
  if (max_outer_iters < 1) throw std::invalid_argument("AoConfig: max_outer_iters must be >= 1");
  if (!(outer_tol > 0.0)) throw std::invalid_argument("AoConfig: outer_tol must be > 0");
  if (!(penalty_lambda >= 0.0)) throw std::invalid_argument("AoConfig: penalty_lambda must be >= 0");
  if (!(lambda_growth >= 1.0)) throw std::invalid_argument("AoConfig: lambda_growth must be >= 1");
  if (max_escalations < 0) throw std::invalid_argument("AoConfig: max_escalations must be >= 0");
  if (max_mm_iters < 1) throw std::invalid_argument("AoConfig: max_mm_iters must be >= 1");
  if (!(mm_tol > 0.0)) throw std::invalid_argument("AoConfig: mm_tol must be > 0");
  if (!(binarize_threshold > 0.0 && binarize_threshold < 1.0)) {
    throw std::invalid_argument("AoConfig: binarize_threshold must lie in (0, 1)");
  }
}

Matrix greedy_association(const Scenario& scenario, Connectivity mode) {
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  const auto bound = static_cast<std::size_t>(connectivity_bound(mode));
  Matrix x(nq * nu, 0.0);
  std::vector<double> load(nq, 0.0);
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < nu; ++j) {
    candidates.clear();
    for (std::size_t n = 0; n < nq; ++n) {
      if (scenario.link(n, j).eligible && scenario.link(n, j).success_probability > 0.0) {
        candidates.push_back(n);
      }
    }
    if (candidates.empty()) continue;
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
      return scenario.link(a, j).success_probability > scenario.link(b, j).success_probability;
    });
    const std::size_t want = std::min(bound, candidates.size());
    const double share = scenario.rmin[j] / static_cast<double>(want);
    std::size_t taken = 0;
    for (std::size_t n : candidates) {
      if (taken == want) break;
      const double need = share / scenario.link(n, j).success_probability;
      if (load[n] + need > scenario.rmax[n]) continue;
      load[n] += need;
      x[n * nu + j] = 1.0;
      ++taken;
    }
    if (taken == 0) {
      const std::size_t n = candidates.front();
      load[n] += scenario.rmin[j] / scenario.link(n, j).success_probability;
      x[n * nu + j] = 1.0;
    }
  }
  return x;
}

RateResult relaxed_rates(const Scenario& scenario) {
  Matrix all(scenario.links.size(), 0.0);
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = scenario.links[k].eligible ? 1.0 : 0.0;
  return solve_rate_subproblem(scenario, all);
}

lp::LpProblem build_association_lp(const Scenario& scenario, std::span<const double> r,
                                   std::span<const double> x_prev, double lambda,
                                   Connectivity mode) {
  check_size(scenario, r, "build_association_lp");
  check_size(scenario, x_prev, "build_association_lp");
  if (!(lambda >= 0.0)) throw std::invalid_argument("build_association_lp: lambda must be >= 0");
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  lp::LpProblem p(nq * nu);
  double offset = 0.0;
  for (std::size_t k = 0; k < nq * nu; ++k) {
    const double rs = r[k] * scenario.links[k].success_probability;
    p.objective[k] = rs - lambda + 2.0 * lambda * x_prev[k];
    offset -= lambda * x_prev[k] * x_prev[k];
    p.lower[k] = 0.0;
    p.upper[k] = scenario.links[k].eligible ? 1.0 : 0.0;
  }
  p.objective_offset = offset;

  std::vector<double> row(nq * nu);
  for (std::size_t j = 0; j < nu; ++j) {
    if (scenario.rmin[j] <= 0.0) continue;
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t n = 0; n < nq; ++n) {
      const std::size_t k = n * nu + j;
      row[k] = -r[k] * scenario.links[k].success_probability;
    }
    p.add_row(row, -scenario.rmin[j]);
  }
  for (std::size_t n = 0; n < nq; ++n) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < nu; ++j) row[n * nu + j] = r[n * nu + j];
    p.add_row(row, scenario.rmax[n]);
  }
  const double bound = connectivity_bound(mode);
  for (std::size_t j = 0; j < nu; ++j) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t n = 0; n < nq; ++n) row[n * nu + j] = 1.0;
    p.add_row(row, bound);
  }
  return p;
}

MmResult solve_association_mm(const Scenario& scenario, std::span<const double> r,
                              const AoConfig& config, std::span<const double> x_init) {
  config.validate();
  check_size(scenario, r, "solve_association_mm");
  check_size(scenario, x_init, "solve_association_mm");
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();

  // QUs with no positive rate anywhere keep their greedy row.
  std::vector<bool> frozen(nu, true);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r[k] > 0.0) frozen[k % nu] = false;
  }
  Matrix greedy;
  if (std::find(frozen.begin(), frozen.end(), true) != frozen.end()) {
    greedy = greedy_association(scenario, config.mode);
  }

  MmResult result;
  double lambda = config.penalty_lambda;
  if (lambda <= 0.0) {
    double top = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      top = std::max(top, r[k] * scenario.links[k].success_probability + 1.0);
    }
    lambda = 10.0 * top;
  }

  Matrix x_prev(x_init.begin(), x_init.end());
  for (int esc = 0; esc <= config.max_escalations; ++esc) {
    result.escalations = esc;
    result.lambda = lambda;
    for (int it = 0; it < config.max_mm_iters; ++it) {
      lp::LpProblem p = build_association_lp(scenario, r, x_prev, lambda, config.mode);
      for (std::size_t j = 0; j < nu; ++j) {
        if (!frozen[j]) continue;
        for (std::size_t n = 0; n < nq; ++n) {
          p.lower[n * nu + j] = p.upper[n * nu + j] = greedy[n * nu + j];
        }
      }
      const lp::LpSolution sol = lp::solve(p);
      ++result.iterations;
      if (sol.status != lp::LpStatus::kOptimal) {
        result.lp_failed = true;
        break;
      }
      result.surrogate.push_back(sol.objective_value);
      result.surrogate_phase.push_back(esc);
      double change = 0.0;
      for (std::size_t k = 0; k < x_prev.size(); ++k) {
        const double v = std::clamp(sol.z[k], 0.0, 1.0);
        change = std::max(change, std::abs(v - x_prev[k]));
        x_prev[k] = v;
      }
      if (change <= config.mm_tol) break;
    }
    if (result.lp_failed) break;
    result.fractional_norm = fractional_norm(x_prev);
    if (result.fractional_norm <= kBinaryTol) break;
    if (esc < config.max_escalations) lambda *= config.lambda_growth;
  }
  result.relaxed = x_prev;
  result.fractional_norm = fractional_norm(x_prev);
  result.fractional = result.fractional_norm > kBinaryTol;
  result.x = round_and_repair(scenario, x_prev, r, config);
  return result;
}

AoSolution alternating_optimize(const Scenario& scenario, const AoConfig& config) {
  config.validate();
  AoSolution out;
  Matrix x = greedy_association(scenario, config.mode);
  std::optional<RateResult> fallback;
  double prev = std::numeric_limits<double>::quiet_NaN();
  bool have_best = false;

  for (int it = 1; it <= config.max_outer_iters; ++it) {
    out.iterations = it;
    const RateResult rates = solve_rate_subproblem(scenario, x);
    const bool feasible = rates.status == lp::LpStatus::kOptimal;
    TraceRecord rec;
    rec.iteration = it;
    rec.feasible = feasible;
    rec.objective = feasible ? rates.objective : std::numeric_limits<double>::quiet_NaN();
    if (feasible && (!have_best || rates.objective > out.objective)) {
      out.x = x;
      out.r = rates.r;
      out.objective = rates.objective;
      have_best = true;
    }
    if (feasible && !std::isnan(prev) &&
        std::abs(rates.objective - prev) < config.outer_tol * std::max(std::abs(prev), 1e-12)) {
      out.trace.push_back(rec);
      out.converged = true;
      break;
    }
    prev = rec.objective;
    if (it == config.max_outer_iters) {
      out.trace.push_back(rec);
      break;
    }

    if (!feasible && !fallback) fallback = relaxed_rates(scenario);
    if (!feasible && fallback->status != lp::LpStatus::kOptimal) {
      out.trace.push_back(rec);
      out.diagnostics = "minimum rates unreachable even with every eligible link active";
      break;
    }
    const MmResult mm = solve_association_mm(scenario, feasible ? rates.r : fallback->r, config, x);
    rec.lambda = mm.lambda;
    rec.fractional_norm = mm.fractional_norm;
    out.trace.push_back(rec);
    if (mm.lp_failed) {
      out.diagnostics = feasible ? "association LP failed" : "association LP infeasible under relaxed rates";
      break;
    }
    if (mm.x == x && feasible) {
      // Unchanged association: the next rate LP reproduces this objective.
      continue;
    }
    x = mm.x;
  }

  out.feasible = have_best;
  if (!have_best) {
    const std::size_t size = scenario.n_qbs() * scenario.n_qu();
    out.x.assign(size, 0.0);
    out.r.assign(size, 0.0);
    out.objective = 0.0;
    if (out.diagnostics.empty()) out.diagnostics = "no feasible association found";
  }
  return out;
}

}  // namespace qnet
