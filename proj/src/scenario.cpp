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

#include "qnet/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <sstream>

#include "qnet/rng.hpp"

namespace qnet {
namespace {

void check_range(Range r, const char* name) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw std::invalid_argument(std::string("ScenarioConfig: ") + name + " range must satisfy lo <= hi");
  }
}

LinkStats evaluate_link(Point a, Point b, double fmin, const ChannelConfig& channel,
                        const FidelityConfig& fidelity) {
  LinkStats s;
  s.distance_m = distance(a, b);
  s.success_probability = success_probability(channel, LinkGeometry{s.distance_m});
  s.fidelity = end_to_end_fidelity(fidelity, s.distance_m);
  s.eligible = s.fidelity >= fmin;
  return s;
}

void size_links(Scenario& scenario) {
  scenario.links.assign(scenario.n_qbs() * scenario.n_qu(), LinkStats{});
}

}  // namespace

void ScenarioConfig::validate() const {
  if (!(area_side_m > 0.0)) throw std::invalid_argument("ScenarioConfig: area_side must be > 0");
  if (n_qbs < 1 || n_qu < 1) throw std::invalid_argument("ScenarioConfig: counts must be >= 1");
  check_range(distance_m, "distance");
  check_range(rmax, "rmax");
  check_range(rmin, "rmin");
  check_range(fmin, "fmin");
  if (distance_m.lo < 0.0) throw std::invalid_argument("ScenarioConfig: distance range must be >= 0");
  if (rmax.lo < 0.0 || rmin.lo < 0.0) throw std::invalid_argument("ScenarioConfig: rates must be >= 0");
  if (fmin.lo < 0.25 || fmin.hi >= 1.0) {
    throw std::invalid_argument("ScenarioConfig: fmin range must lie within [0.25, 1)");
  }
  if (max_placement_attempts < 1 || max_snapshot_retries < 1) {
    throw std::invalid_argument("ScenarioConfig: attempt budgets must be >= 1");
  }
  channel.validate();
  fidelity.validate();
}

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

void compute_links(Scenario& scenario, const ChannelConfig& channel, const FidelityConfig& fidelity) {
  size_links(scenario);
  const std::size_t nu = scenario.n_qu();
  const auto total = static_cast<std::int64_t>(scenario.links.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < total; ++k) {
    const auto n = static_cast<std::size_t>(k) / nu;
    const auto j = static_cast<std::size_t>(k) % nu;
    try {
      scenario.links[k] = evaluate_link(scenario.qbs[n], scenario.qu[j], scenario.fmin[j], channel, fidelity);
    } catch (...) {
#pragma omp critical(qnet_links_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

void compute_links_serial(Scenario& scenario, const ChannelConfig& channel,
                          const FidelityConfig& fidelity) {
  size_links(scenario);
  for (std::size_t n = 0; n < scenario.n_qbs(); ++n) {
    for (std::size_t j = 0; j < scenario.n_qu(); ++j) {
      scenario.link(n, j) = evaluate_link(scenario.qbs[n], scenario.qu[j], scenario.fmin[j], channel, fidelity);
    }
  }
}

void refresh_eligibility(Scenario& scenario) {
  for (std::size_t n = 0; n < scenario.n_qbs(); ++n) {
    for (std::size_t j = 0; j < scenario.n_qu(); ++j) {
      LinkStats& l = scenario.link(n, j);
      l.eligible = l.fidelity >= scenario.fmin[j];
    }
  }
}

Scenario generate(const ScenarioConfig& config) {
  config.validate();
  Scenario s;
  s.seed = config.seed;
  const auto nq = static_cast<std::size_t>(config.n_qbs);
  const auto nu = static_cast<std::size_t>(config.n_qu);
  const double side = config.area_side_m;

  CounterRng qbs_rng = CounterRng::stream(config.seed, StreamPurpose::kQbsPositions);
  s.qbs.resize(nq);
  for (auto& p : s.qbs) {
    p.x = qbs_rng.uniform(0.0, side);
    p.y = qbs_rng.uniform(0.0, side);
  }

  CounterRng qu_rng = CounterRng::stream(config.seed, StreamPurpose::kQuPositions);
  s.qu.resize(nu);
  s.placement_attempts.assign(nu, 0);
  for (std::size_t j = 0; j < nu; ++j) {
    bool placed = false;
    for (int attempt = 1; attempt <= config.max_placement_attempts; ++attempt) {
      const Point p{qu_rng.uniform(0.0, side), qu_rng.uniform(0.0, side)};
      const bool ok = std::all_of(s.qbs.begin(), s.qbs.end(), [&](Point q) {
        const double d = distance(p, q);
        return d >= config.distance_m.lo && d <= config.distance_m.hi;
      });
      if (ok) {
        s.qu[j] = p;
        s.placement_attempts[j] = attempt;
        placed = true;
        break;
      }
    }
    if (!placed) {
      char msg[160];
      std::snprintf(msg, sizeof msg,
                    "link distance range [%g, %g] m unreachable for QU %zu after %d attempts",
                    config.distance_m.lo, config.distance_m.hi, j, config.max_placement_attempts);
      throw GenerationError(msg);
    }
  }

  CounterRng cap_rng = CounterRng::stream(config.seed, StreamPurpose::kCapacity);
  s.rmax.resize(nq);
  for (auto& r : s.rmax) r = cap_rng.uniform(config.rmax.lo, config.rmax.hi);
  CounterRng dem_rng = CounterRng::stream(config.seed, StreamPurpose::kDemand);
  s.rmin.resize(nu);
  for (auto& r : s.rmin) r = dem_rng.uniform(config.rmin.lo, config.rmin.hi);
  CounterRng fid_rng = CounterRng::stream(config.seed, StreamPurpose::kFidelityRequirement);
  s.fmin.resize(nu);
  for (auto& f : s.fmin) f = fid_rng.uniform(config.fmin.lo, config.fmin.hi);

  compute_links(s, config.channel, config.fidelity);
  return s;
}

std::vector<bool> eligibility_mask(const Scenario& scenario) {
  std::vector<bool> mask(scenario.n_qbs() * scenario.n_qu());
  for (std::size_t n = 0; n < scenario.n_qbs(); ++n) {
    for (std::size_t j = 0; j < scenario.n_qu(); ++j) {
      mask[n * scenario.n_qu() + j] = scenario.link(n, j).fidelity >= scenario.fmin[j];
    }
  }
  return mask;
}

FeasibilityReport is_potentially_feasible(const Scenario& scenario) {
  const auto mask = eligibility_mask(scenario);
  const std::size_t nq = scenario.n_qbs();
  const std::size_t nu = scenario.n_qu();
  FeasibilityReport report;
  double best_s = 0.0;
  double total_demand = 0.0;
  for (std::size_t j = 0; j < nu; ++j) {
    total_demand += scenario.rmin[j];
    // The two largest deliverable rates bound what dual connectivity can give.
    double top1 = 0.0;
    double top2 = 0.0;
    bool any = false;
    for (std::size_t n = 0; n < nq; ++n) {
      if (!mask[n * nu + j]) continue;
      any = true;
      best_s = std::max(best_s, scenario.link(n, j).success_probability);
      const double reach = scenario.link(n, j).success_probability * scenario.rmax[n];
      if (reach > top1) {
        top2 = top1;
        top1 = reach;
      } else if (reach > top2) {
        top2 = reach;
      }
    }
    if (scenario.rmin[j] <= 0.0) continue;
    if (!any) return {false, "no eligible QBS", static_cast<int>(j)};
    if (top1 + top2 < scenario.rmin[j]) {
      return {false, "minimum rate unreachable from eligible QBSs", static_cast<int>(j)};
    }
  }
  double total_capacity = 0.0;
  for (double r : scenario.rmax) total_capacity += r;
  if (total_demand > total_capacity * best_s) {
    return {false, "aggregate minimum rate exceeds deliverable capacity", -1};
  }
  return report;
}

GeneratedSnapshot generate_snapshot(const ScenarioConfig& config) {
  config.validate();
  GeneratedSnapshot out;
  std::string last_reason;
  const int tries = config.infeasible_policy == InfeasiblePolicy::kResample ? config.max_snapshot_retries : 1;
  for (int attempt = 0; attempt < tries; ++attempt) {
    ScenarioConfig cfg = config;
    cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(attempt));
    try {
      out.scenario = generate(cfg);
    } catch (const GenerationError& e) {
      if (config.infeasible_policy == InfeasiblePolicy::kReport) throw;
      last_reason = e.what();
      ++out.rejected;
      continue;
    }
    out.screen = is_potentially_feasible(out.scenario);
    if (out.screen.feasible || config.infeasible_policy == InfeasiblePolicy::kReport) return out;
    last_reason = out.screen.reason;
    ++out.rejected;
  }
  throw GenerationError("no feasible snapshot after " + std::to_string(tries) +
                        " draws; last rejection: " + last_reason);
}

void write_scenario(std::ostream& out, const Scenario& s) {
  char buf[256];
  out << "qnet-scenario 1\n";
  out << "scenario " << s.seed << ' ' << s.n_qbs() << ' ' << s.n_qu() << '\n';
  for (std::size_t n = 0; n < s.n_qbs(); ++n) {
    std::snprintf(buf, sizeof buf, "qbs %zu %.17g %.17g %.17g\n", n, s.qbs[n].x, s.qbs[n].y, s.rmax[n]);
    out << buf;
  }
  for (std::size_t j = 0; j < s.n_qu(); ++j) {
    const int attempts = j < s.placement_attempts.size() ? s.placement_attempts[j] : 0;
    std::snprintf(buf, sizeof buf, "qu %zu %.17g %.17g %.17g %.17g %d\n", j, s.qu[j].x, s.qu[j].y,
                  s.rmin[j], s.fmin[j], attempts);
    out << buf;
  }
  for (std::size_t n = 0; n < s.n_qbs(); ++n) {
    for (std::size_t j = 0; j < s.n_qu(); ++j) {
      const LinkStats& l = s.link(n, j);
      std::snprintf(buf, sizeof buf, "link %zu %zu %.17g %.17g %.17g %d\n", n, j, l.distance_m,
                    l.success_probability, l.fidelity, l.eligible ? 1 : 0);
      out << buf;
    }
  }
}

Scenario read_scenario(std::istream& in) {
  std::string line;
  auto next = [&](const char* tag) {
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream ss(line);
      std::string head;
      ss >> head;
      if (head != tag) throw std::invalid_argument(std::string("scenario text: expected '") + tag + "'");
      return ss;
    }
    throw std::invalid_argument(std::string("scenario text: missing '") + tag + "' record");
  };
  auto num = [](std::istringstream& ss) {
    std::string tok;
    if (!(ss >> tok)) throw std::invalid_argument("scenario text: short record");
    return std::strtod(tok.c_str(), nullptr);
  };
  auto index = [](std::istringstream& ss, std::size_t expected) {
    std::size_t i = 0;
    if (!(ss >> i) || i != expected) throw std::invalid_argument("scenario text: records out of order");
  };

  auto head = next("qnet-scenario");
  int version = 0;
  head >> version;
  if (version != 1) throw std::invalid_argument("scenario text: unsupported version");
  auto meta = next("scenario");
  Scenario s;
  std::size_t nq = 0;
  std::size_t nu = 0;
  if (!(meta >> s.seed >> nq >> nu)) throw std::invalid_argument("scenario text: malformed header");
  s.qbs.resize(nq);
  s.rmax.resize(nq);
  for (std::size_t n = 0; n < nq; ++n) {
    auto r = next("qbs");
    index(r, n);
    s.qbs[n] = {num(r), num(r)};
    s.rmax[n] = num(r);
  }
  s.qu.resize(nu);
  s.rmin.resize(nu);
  s.fmin.resize(nu);
  s.placement_attempts.resize(nu);
  for (std::size_t j = 0; j < nu; ++j) {
    auto r = next("qu");
    index(r, j);
    s.qu[j] = {num(r), num(r)};
    s.rmin[j] = num(r);
    s.fmin[j] = num(r);
    s.placement_attempts[j] = static_cast<int>(num(r));
  }
  s.links.resize(nq * nu);
  for (std::size_t n = 0; n < nq; ++n) {
    for (std::size_t j = 0; j < nu; ++j) {
      auto r = next("link");
      index(r, n);
      index(r, j);
      LinkStats& l = s.link(n, j);
      l.distance_m = num(r);
      l.success_probability = num(r);
      l.fidelity = num(r);
      l.eligible = num(r) != 0.0;
    }
  }
  return s;
}

}  // namespace qnet
