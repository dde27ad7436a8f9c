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

#include "qnet/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

#include "qnet/exact_oracle.hpp"

extern char** environ;

namespace qnet::harness {
namespace {

constexpr std::uint64_t kExactBudget = 1000000;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_double(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw SpecError(std::string(key) + ": expected a number, got '" + t + "'");
  }
  return v;
}

long long to_integer(std::string_view key, std::string_view text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) {
    throw SpecError(std::string(key) + ": expected an integer, got '" + trim(text) + "'");
  }
  return static_cast<long long>(v);
}

int to_int(std::string_view key, std::string_view text) {
  const long long v = to_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) throw SpecError(std::string(key) + ": out of range");
  return static_cast<int>(v);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

using Setter = std::function<void(ExperimentSpec&, std::string_view key, std::string_view value)>;

template <typename T>
Setter number(T ExperimentSpec::*section, double T::*field) {
  return [=](ExperimentSpec& s, std::string_view k, std::string_view v) {
    s.*section.*field = to_double(k, v);
  };
}

template <typename T>
Setter integer(T ExperimentSpec::*section, int T::*field) {
  return [=](ExperimentSpec& s, std::string_view k, std::string_view v) {
    s.*section.*field = to_int(k, v);
  };
}

Setter range_lo(Range ScenarioConfig::*field) {
  return [=](ExperimentSpec& s, std::string_view k, std::string_view v) {
    (s.scenario.*field).lo = to_double(k, v);
  };
}

Setter range_hi(Range ScenarioConfig::*field) {
  return [=](ExperimentSpec& s, std::string_view k, std::string_view v) {
    (s.scenario.*field).hi = to_double(k, v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"experiment.kind",
       [](ExperimentSpec& s, std::string_view, std::string_view v) {
         s.experiment = parse_experiment(trim(v));
       }},
      {"experiment.sweep",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.sweep.clear();
         if (trim(v).empty()) return;
         for (const auto& item : split(v, ',')) s.sweep.push_back(to_double(k, item));
       }},
      {"experiment.snapshots",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) { s.snapshots = to_int(k, v); }},
      {"experiment.seed",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         const long long seed = to_integer(k, v);
         if (seed < 0) throw SpecError(std::string(k) + ": must be non-negative");
         s.base_seed = static_cast<std::uint64_t>(seed);
       }},
      {"experiment.compare",
       [](ExperimentSpec& s, std::string_view, std::string_view v) {
         s.compare.clear();
         for (const auto& item : split(v, ',')) s.compare.push_back(parse_method(item));
       }},
      {"scenario.area_side", number(&ExperimentSpec::scenario, &ScenarioConfig::area_side_m)},
      {"scenario.n_qbs", integer(&ExperimentSpec::scenario, &ScenarioConfig::n_qbs)},
      {"scenario.n_qu", integer(&ExperimentSpec::scenario, &ScenarioConfig::n_qu)},
      {"scenario.distance_min", range_lo(&ScenarioConfig::distance_m)},
      {"scenario.distance_max", range_hi(&ScenarioConfig::distance_m)},
      {"scenario.rmax_min", range_lo(&ScenarioConfig::rmax)},
      {"scenario.rmax_max", range_hi(&ScenarioConfig::rmax)},
      {"scenario.rmin_min", range_lo(&ScenarioConfig::rmin)},
      {"scenario.rmin_max", range_hi(&ScenarioConfig::rmin)},
      {"scenario.fmin_min", range_lo(&ScenarioConfig::fmin)},
      {"scenario.fmin_max", range_hi(&ScenarioConfig::fmin)},
      {"scenario.max_placement_attempts",
       integer(&ExperimentSpec::scenario, &ScenarioConfig::max_placement_attempts)},
      {"scenario.max_snapshot_retries",
       integer(&ExperimentSpec::scenario, &ScenarioConfig::max_snapshot_retries)},
      {"scenario.infeasible_policy",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         const std::string t = trim(v);
         if (t == "resample") {
           s.scenario.infeasible_policy = InfeasiblePolicy::kResample;
         } else if (t == "report") {
           s.scenario.infeasible_policy = InfeasiblePolicy::kReport;
         } else {
           throw SpecError(std::string(k) + ": expected resample or report, got '" + t + "'");
         }
       }},
      {"channel.kappa",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.kappa_db_per_km = to_double(k, v);
       }},
      {"channel.aperture_radius",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.aperture_radius_m = to_double(k, v);
       }},
      {"channel.sigma_s",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.sigma_s_mrad = to_double(k, v);
       }},
      {"channel.theta_d",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.theta_d_mrad = to_double(k, v);
       }},
      {"channel.cn2",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.cn2 = to_double(k, v);
       }},
      {"channel.wavelength",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.wavelength_m = to_double(k, v);
       }},
      {"channel.responsivity",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.responsivity = to_double(k, v);
       }},
      {"channel.eta_th",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.channel.eta_th = to_double(k, v);
       }},
      {"channel.jitter_mode",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         const std::string t = trim(v);
         if (t == "angular") {
           s.scenario.channel.jitter_mode = PointingJitterMode::kAngular;
         } else if (t == "metric") {
           s.scenario.channel.jitter_mode = PointingJitterMode::kMetric;
         } else {
           throw SpecError(std::string(k) + ": expected angular or metric, got '" + t + "'");
         }
       }},
      {"fidelity.xi",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.fidelity.xi_per_km = to_double(k, v);
       }},
      {"fidelity.coherence_time",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.fidelity.coherence_time_s = to_double(k, v);
       }},
      {"fidelity.processing_delay",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.fidelity.processing_delay_s = to_double(k, v);
       }},
      {"fidelity.light_speed",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         s.scenario.fidelity.light_speed_m_per_s = to_double(k, v);
       }},
      {"fidelity.xi_mode",
       [](ExperimentSpec& s, std::string_view k, std::string_view v) {
         const std::string t = trim(v);
         if (t == "natural") {
           s.scenario.fidelity.xi_mode = DegradationMode::kNatural;
         } else if (t == "decibel") {
           s.scenario.fidelity.xi_mode = DegradationMode::kDecibel;
         } else {
           throw SpecError(std::string(k) + ": expected natural or decibel, got '" + t + "'");
         }
       }},
      {"ao.max_outer_iters", integer(&ExperimentSpec::ao, &AoConfig::max_outer_iters)},
      {"ao.outer_tol", number(&ExperimentSpec::ao, &AoConfig::outer_tol)},
      {"ao.penalty_lambda", number(&ExperimentSpec::ao, &AoConfig::penalty_lambda)},
      {"ao.lambda_growth", number(&ExperimentSpec::ao, &AoConfig::lambda_growth)},
      {"ao.max_escalations", integer(&ExperimentSpec::ao, &AoConfig::max_escalations)},
      {"ao.max_mm_iters", integer(&ExperimentSpec::ao, &AoConfig::max_mm_iters)},
      {"ao.mm_tol", number(&ExperimentSpec::ao, &AoConfig::mm_tol)},
      {"ao.binarize_threshold", number(&ExperimentSpec::ao, &AoConfig::binarize_threshold)},
  };
  return table;
}

bool is_exact(Method m) { return m == Method::kExactDc || m == Method::kExactSc; }

Connectivity connectivity_of(Method m) {
  return m == Method::kAoDc || m == Method::kExactDc ? Connectivity::kDual : Connectivity::kSingle;
}

// Largest per-QU choice product the exact oracle could face; the empty
// choice only exists for QUs without a minimum rate.
double worst_case_combinations(const ScenarioConfig& cfg, Connectivity mode) {
  const double nq = cfg.n_qbs;
  double per_qu = nq + (cfg.rmin.lo > 0.0 ? 0.0 : 1.0);
  if (mode == Connectivity::kDual) per_qu += 0.5 * nq * (nq - 1);
  return std::pow(per_qu, cfg.n_qu);
}

struct TaskOutput {
  std::vector<RawRow> rows;
  std::vector<TraceRow> trace;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

TaskOutput run_task(const ExperimentSpec& spec, double sweep_value, int snapshot,
                    const RunOptions& options) {
  TaskOutput out;
  const ScenarioConfig cfg = scenario_for(spec, sweep_value, snapshot);
  const std::string experiment = to_string(spec.experiment);
  std::vector<Method> methods = spec.compare;
  std::sort(methods.begin(), methods.end(),
            [](Method a, Method b) { return to_string(a) < to_string(b); });

  auto make_row = [&](Method m) {
    RawRow row;
    row.experiment = experiment;
    row.sweep_value = sweep_value;
    row.seed = cfg.seed;
    row.method = to_string(m);
    return row;
  };

  Scenario scenario;
  try {
    scenario = generate_snapshot(cfg).scenario;
  } catch (const std::exception& e) {
    for (Method m : methods) {
      RawRow row = make_row(m);
      row.status = "no_snapshot";
      out.rows.push_back(row);
    }
    out.warnings.push_back("seed " + std::to_string(cfg.seed) + ": " + e.what());
    return out;
  }

  for (Method m : methods) {
    RawRow row = make_row(m);
    const auto start = std::chrono::steady_clock::now();
    try {
      if (is_exact(m)) {
        const OracleResult res = enumerate_optimal(scenario, connectivity_of(m), kExactBudget);
        row.status = res.feasible ? "ok" : "infeasible";
        row.objective = res.objective;
        row.iterations = res.evaluated;
      } else {
        AoConfig ao = spec.ao;
        ao.mode = connectivity_of(m);
        const AoSolution sol = alternating_optimize(scenario, ao);
        row.status = sol.feasible ? "ok" : "infeasible";
        row.objective = sol.objective;
        row.iterations = static_cast<std::uint64_t>(sol.iterations);
        for (const TraceRecord& rec : sol.trace) {
          out.trace.push_back({experiment, sweep_value, cfg.seed, row.method, rec});
        }
      }
    } catch (const std::exception& e) {
      row.status = "error";
      row.objective = 0.0;
      out.errors.push_back("seed " + std::to_string(cfg.seed) + " " + row.method + ": " + e.what());
    }
    if (!options.deterministic) {
      row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                           .count();
    }
    out.rows.push_back(row);
  }
  return out;
}

std::string timestamp_line() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[64];
  std::strftime(buf, sizeof buf, "# generated %Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergence: return "convergence";
    case ExperimentKind::kSweepUsers: return "sweep_users";
    case ExperimentKind::kSweepQbs: return "sweep_qbs";
    case ExperimentKind::kSweepRmin: return "sweep_rmin";
    case ExperimentKind::kSingle: return "single";
  }
  return "unknown";
}

std::string to_string(Method method) {
  switch (method) {
    case Method::kAoDc: return "AO_DC";
    case Method::kAoSc: return "AO_SC";
    case Method::kExactDc: return "EXACT_DC";
    case Method::kExactSc: return "EXACT_SC";
  }
  return "unknown";
}

ExperimentKind parse_experiment(std::string_view text) {
  for (auto k : {ExperimentKind::kConvergence, ExperimentKind::kSweepUsers, ExperimentKind::kSweepQbs,
                 ExperimentKind::kSweepRmin, ExperimentKind::kSingle}) {
    if (to_string(k) == text) return k;
  }
  throw SpecError("unknown experiment '" + std::string(text) + "'");
}

Method parse_method(std::string_view text) {
  for (auto m : {Method::kAoDc, Method::kAoSc, Method::kExactDc, Method::kExactSc}) {
    if (to_string(m) == text) return m;
  }
  throw SpecError("unknown method '" + std::string(text) + "'");
}

void ExperimentSpec::validate() const {
  if (snapshots < 1) throw SpecError("experiment.snapshots must be >= 1");
  if (compare.empty()) throw SpecError("experiment.compare must name at least one method");
  for (std::size_t i = 0; i < compare.size(); ++i) {
    for (std::size_t k = i + 1; k < compare.size(); ++k) {
      if (compare[i] == compare[k]) throw SpecError("experiment.compare lists " + to_string(compare[i]) + " twice");
    }
  }
  const bool sweeping = experiment == ExperimentKind::kSweepUsers ||
                        experiment == ExperimentKind::kSweepQbs ||
                        experiment == ExperimentKind::kSweepRmin;
  if (sweeping && sweep.empty()) throw SpecError(to_string(experiment) + " needs experiment.sweep values");
  if (!sweeping && !sweep.empty()) throw SpecError(to_string(experiment) + " takes no experiment.sweep values");
  for (double v : sweep) {
    if (experiment != ExperimentKind::kSweepRmin && (v < 1.0 || v != std::floor(v))) {
      throw SpecError("experiment.sweep: counts must be positive integers");
    }
    if (experiment == ExperimentKind::kSweepRmin && v < 0.0) {
      throw SpecError("experiment.sweep: minimum rates must be non-negative");
    }
  }
  try {
    ao.validate();
    for (double v : sweep_points(*this)) scenario_for(*this, v, 0).validate();
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    throw SpecError(e.what());
  }
  for (Method m : compare) {
    if (!is_exact(m)) continue;
    for (double v : sweep_points(*this)) {
      const ScenarioConfig cfg = scenario_for(*this, v, 0);
      if (worst_case_combinations(cfg, connectivity_of(m)) > kExactBudget) {
        throw SpecError(to_string(m) + " is limited to instances with at most " +
                        std::to_string(kExactBudget) + " association combinations (N=" +
                        std::to_string(cfg.n_qbs) + ", U=" + std::to_string(cfg.n_qu) + " exceeds it)");
      }
    }
  }
}

void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw SpecError("unknown setting '" + std::string(key) + "'");
  it->second(spec, key, value);
}

std::optional<std::string> setting_key_from_env(std::string_view name) {
  constexpr std::string_view prefix = "QNET_";
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  std::string rest(name.substr(prefix.size()));
  const auto sep = rest.find('_');
  if (sep == std::string::npos || sep == 0 || sep + 1 == rest.size()) return std::nullopt;
  std::transform(rest.begin(), rest.end(), rest.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  rest[sep] = '.';
  return rest;
}

ExperimentSpec parse_spec(std::istream& in, const std::map<std::string, std::string>& env) {
  ExperimentSpec spec;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw SpecError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    try {
      apply_setting(spec, trim(std::string_view(body).substr(0, eq)), std::string_view(body).substr(eq + 1));
    } catch (const SpecError& e) {
      throw SpecError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (const auto& [name, value] : env) {
    const auto key = setting_key_from_env(name);
    if (!key) continue;
    try {
      apply_setting(spec, *key, value);
    } catch (const SpecError& e) {
      throw SpecError(name + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

std::map<std::string, std::string> qnet_environment() {
  std::map<std::string, std::string> env;
  for (char** e = environ; e && *e; ++e) {
    const std::string_view entry(*e);
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos || entry.substr(0, 5) != "QNET_") continue;
    env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
  }
  return env;
}

std::vector<double> sweep_points(const ExperimentSpec& spec) {
  if (spec.sweep.empty()) return {0.0};
  return spec.sweep;
}

ScenarioConfig scenario_for(const ExperimentSpec& spec, double sweep_value, int snapshot) {
  ScenarioConfig cfg = spec.scenario;
  cfg.seed = spec.base_seed + static_cast<std::uint64_t>(snapshot);
  switch (spec.experiment) {
    case ExperimentKind::kSweepUsers: cfg.n_qu = static_cast<int>(sweep_value); break;
    case ExperimentKind::kSweepQbs: cfg.n_qbs = static_cast<int>(sweep_value); break;
    case ExperimentKind::kSweepRmin: cfg.rmin = Range{sweep_value, 2.0 * sweep_value}; break;
    case ExperimentKind::kConvergence:
    case ExperimentKind::kSingle: break;
  }
  return cfg;
}

RunResult run(const ExperimentSpec& spec, const RunOptions& options) {
  spec.validate();
  if (options.jobs < 1) throw SpecError("jobs must be >= 1");
  const std::vector<double> points = sweep_points(spec);
  const int snapshots = spec.snapshots;
  const long long tasks = static_cast<long long>(points.size()) * snapshots;
  std::vector<TaskOutput> outputs(static_cast<std::size_t>(tasks));

#pragma omp parallel for schedule(dynamic) num_threads(options.jobs)
  for (long long t = 0; t < tasks; ++t) {
    outputs[static_cast<std::size_t>(t)] =
        run_task(spec, points[static_cast<std::size_t>(t / snapshots)], static_cast<int>(t % snapshots),
                 options);
  }

  // Tasks are laid out by sweep point then seed, which is canonical once the
  // points are sorted.
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

  RunResult result;
  for (std::size_t p : order) {
    for (int s = 0; s < snapshots; ++s) {
      TaskOutput& o = outputs[p * static_cast<std::size_t>(snapshots) + static_cast<std::size_t>(s)];
      for (auto& r : o.rows) {
        result.any_failure = result.any_failure || r.status == "error";
        result.raw.push_back(std::move(r));
      }
      for (auto& r : o.trace) result.trace.push_back(std::move(r));
      for (auto& e : o.errors) result.errors.push_back(std::move(e));
      for (auto& w : o.warnings) result.summary.warnings.push_back(std::move(w));
    }
  }
  std::vector<std::string> generation = std::move(result.summary.warnings);
  result.summary = summarize(result.raw);
  generation.insert(generation.end(), result.summary.warnings.begin(), result.summary.warnings.end());
  result.summary.warnings = std::move(generation);
  return result;
}

Summary summarize(const std::vector<RawRow>& raw) {
  Summary summary;
  using GroupKey = std::tuple<std::string, double, std::string>;
  struct Group {
    std::vector<double> ok;
    int all = 0;
  };
  std::map<GroupKey, Group> groups;
  using PointKey = std::pair<std::string, double>;
  std::map<PointKey, std::map<std::string, std::map<std::uint64_t, const RawRow*>>> by_point;
  for (const RawRow& r : raw) {
    Group& g = groups[{r.experiment, r.sweep_value, r.method}];
    ++g.all;
    if (r.status == "ok") g.ok.push_back(r.objective);
    by_point[{r.experiment, r.sweep_value}][r.method][r.seed] = &r;
  }

  for (const auto& [key, g] : groups) {
    AggregateRow row;
    std::tie(row.experiment, row.sweep_value, row.method) = key;
    row.n = static_cast<int>(g.ok.size());
    row.n_all = g.all;
    double sum = 0.0;
    for (double v : g.ok) sum += v;
    if (row.n > 0) row.mean = sum / row.n;
    if (row.n > 1) {
      double ss = 0.0;
      for (double v : g.ok) ss += (v - row.mean) * (v - row.mean);
      row.std_error = std::sqrt(ss / (row.n - 1) / row.n);
    }
    row.mean_all = row.n_all > 0 ? sum / row.n_all : 0.0;
    summary.aggregate.push_back(row);
  }

  auto mean_all = [&](const PointKey& p, const std::string& method) -> std::optional<double> {
    const auto it = groups.find({p.first, p.second, method});
    if (it == groups.end()) return std::nullopt;
    double sum = 0.0;
    for (double v : it->second.ok) sum += v;
    return sum / it->second.all;
  };

  for (const auto& [point, methods] : by_point) {
    GapRow gap;
    gap.experiment = point.first;
    gap.sweep_value = point.second;
    const std::string where = point.first + " at " + format_number(point.second);

    const auto ratio = [&](const char* dc, const char* sc) -> std::optional<double> {
      const auto a = mean_all(point, dc);
      const auto b = mean_all(point, sc);
      if (!a || !b || *b <= 0.0) return std::nullopt;
      return 100.0 * (*a / *b - 1.0);
    };
    gap.dc_over_sc_pct = ratio("AO_DC", "AO_SC");
    gap.exact_dc_over_sc_pct = ratio("EXACT_DC", "EXACT_SC");

    const auto gap_for = [&](const char* ao, const char* exact, int& n) -> std::optional<double> {
      const auto e = methods.find(exact);
      const auto a = methods.find(ao);
      if (e == methods.end()) return std::nullopt;
      if (a == methods.end()) {
        summary.warnings.push_back(where + ": " + exact + " present without " + ao + "; gap omitted");
        return std::nullopt;
      }
      double sum = 0.0;
      for (const auto& [seed, erow] : e->second) {
        if (erow->status != "ok" || erow->objective <= 0.0) continue;
        const auto arow = a->second.find(seed);
        if (arow == a->second.end()) continue;
        const double got = arow->second->status == "ok" ? arow->second->objective : 0.0;
        sum += (erow->objective - got) / erow->objective;
        ++n;
      }
      if (n == 0) return std::nullopt;
      return 100.0 * sum / n;
    };
    gap.gap_dc_pct = gap_for("AO_DC", "EXACT_DC", gap.gap_dc_n);
    gap.gap_sc_pct = gap_for("AO_SC", "EXACT_SC", gap.gap_sc_n);
    if (!gap.dc_over_sc_pct && (methods.count("AO_DC") != methods.count("AO_SC"))) {
      summary.warnings.push_back(where + ": DC/SC improvement needs both AO_DC and AO_SC");
    }
    summary.gaps.push_back(gap);
  }
  return summary;
}

void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows) {
  out << "experiment,sweep_value,seed,method,status,objective_pairs_per_s,iterations,runtime_ms\n";
  for (const RawRow& r : rows) {
    out << r.experiment << ',' << format_number(r.sweep_value) << ',' << r.seed << ',' << r.method << ','
        << r.status << ',' << format_number(r.objective) << ',' << r.iterations << ','
        << format_number(r.runtime_ms) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "experiment,sweep_value,seed,method,iteration,objective_pairs_per_s,feasible,lambda,"
         "fractional_norm\n";
  for (const TraceRow& r : rows) {
    out << r.experiment << ',' << format_number(r.sweep_value) << ',' << r.seed << ',' << r.method << ','
        << r.record.iteration << ','
        << (r.record.feasible ? format_number(r.record.objective) : std::string()) << ','
        << (r.record.feasible ? 1 : 0) << ',' << format_number(r.record.lambda) << ','
        << format_number(r.record.fractional_norm) << '\n';
  }
}

void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << "experiment,sweep_value,method,mean,stderr,n,mean_all,n_all\n";
  for (const AggregateRow& r : rows) {
    out << r.experiment << ',' << format_number(r.sweep_value) << ',' << r.method << ','
        << format_number(r.mean) << ',' << format_number(r.std_error) << ',' << r.n << ','
        << format_number(r.mean_all) << ',' << r.n_all << '\n';
  }
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "experiment,sweep_value,dc_over_sc_pct,exact_dc_over_sc_pct,gap_dc_pct,gap_dc_n,gap_sc_pct,"
         "gap_sc_n\n";
  for (const GapRow& r : rows) {
    out << r.experiment << ',' << format_number(r.sweep_value) << ',' << format_optional(r.dc_over_sc_pct)
        << ',' << format_optional(r.exact_dc_over_sc_pct) << ',' << format_optional(r.gap_dc_pct) << ','
        << r.gap_dc_n << ',' << format_optional(r.gap_sc_pct) << ',' << r.gap_sc_n << '\n';
  }
}

std::vector<RawRow> read_raw_csv(std::istream& in) {
  std::vector<RawRow> rows;
  std::string line;
  bool header = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (!header) {
      if (f.size() < 8 || f[0] != "experiment" || f[5] != "objective_pairs_per_s") {
        throw SpecError("raw CSV: unexpected header");
      }
      header = true;
      continue;
    }
    if (f.size() != 8) throw SpecError("raw CSV line " + std::to_string(line_no) + ": expected 8 fields");
    RawRow r;
    r.experiment = f[0];
    r.sweep_value = to_double("sweep_value", f[1]);
    r.seed = static_cast<std::uint64_t>(to_integer("seed", f[2]));
    r.method = f[3];
    r.status = f[4];
    r.objective = to_double("objective_pairs_per_s", f[5]);
    r.iterations = static_cast<std::uint64_t>(to_integer("iterations", f[6]));
    r.runtime_ms = to_double("runtime_ms", f[7]);
    rows.push_back(std::move(r));
  }
  if (!header) throw SpecError("raw CSV: missing header");
  return rows;
}

void write_outputs(const RunResult& result, const std::string& dir, const RunOptions& options) {
  std::filesystem::create_directories(dir);
  const std::string stamp = options.deterministic ? std::string() : timestamp_line() + "\n";
  auto emit = [&](const char* name, const std::function<void(std::ostream&)>& body) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << stamp;
    body(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
  };
  emit("raw.csv", [&](std::ostream& o) { write_raw_csv(o, result.raw); });
  emit("aggregate.csv", [&](std::ostream& o) { write_aggregate_csv(o, result.summary.aggregate); });
  emit("gaps.csv", [&](std::ostream& o) { write_gap_csv(o, result.summary.gaps); });
  emit("trace.csv", [&](std::ostream& o) { write_trace_csv(o, result.trace); });
}

}  // namespace qnet::harness
