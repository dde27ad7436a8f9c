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

#ifndef QNET_HARNESS_HPP
#define QNET_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qnet/ao_optimizer.hpp"
#include "qnet/scenario.hpp"

namespace qnet::harness {

enum class ExperimentKind { kConvergence, kSweepUsers, kSweepQbs, kSweepRmin, kSingle };
enum class Method { kAoDc, kAoSc, kExactDc, kExactSc };

std::string to_string(ExperimentKind kind);
std::string to_string(Method method);
ExperimentKind parse_experiment(std::string_view text);
Method parse_method(std::string_view text);

/// Invalid experiment specification (bad key, value or combination).
class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::kSingle;
  std::vector<double> sweep;  // n_qu, n_qbs or the lower Rmin bound per point
  int snapshots = 1;
  std::uint64_t base_seed = 1;
  ScenarioConfig scenario;
  AoConfig ao;
  std::vector<Method> compare{Method::kAoDc};

  void validate() const;
};

/// Sets one `section.key` entry; throws SpecError for unknown keys or
/// malformed values.
void apply_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);

/// QNET_<SECTION>_<KEY> -> section.key (lower case); nullopt for other names.
std::optional<std::string> setting_key_from_env(std::string_view name);

/// Flat `key = value` lines, `#` comments. Environment overrides are applied
/// after the file, then the spec is validated.
ExperimentSpec parse_spec(std::istream& in, const std::map<std::string, std::string>& env = {});

/// QNET_* variables of the current process.
std::map<std::string, std::string> qnet_environment();

/// Points of the sweep; a single 0 for experiments without one.
std::vector<double> sweep_points(const ExperimentSpec& spec);

/// Scenario configuration for one sweep point and snapshot index; the
/// snapshot seed is base_seed + index.
ScenarioConfig scenario_for(const ExperimentSpec& spec, double sweep_value, int snapshot);

struct RawRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  std::string status;  // ok, infeasible, no_snapshot or error
  double objective = 0.0;  // pairs/s
  std::uint64_t iterations = 0;
  double runtime_ms = 0.0;
};

struct TraceRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::string method;
  TraceRecord record;
};

struct AggregateRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::string method;
  double mean = 0.0;    // over ok rows
  double std_error = 0.0;  // of that mean
  int n = 0;
  double mean_all = 0.0;  // over all snapshots, non-ok rows counting as zero rate
  int n_all = 0;
};

struct GapRow {
  std::string experiment;
  double sweep_value = 0.0;
  std::optional<double> dc_over_sc_pct;        // AO means, all snapshots
  std::optional<double> exact_dc_over_sc_pct;  // EXACT means, all snapshots
  std::optional<double> gap_dc_pct;  // mean over snapshots of (EXACT - AO) / EXACT
  std::optional<double> gap_sc_pct;
  int gap_dc_n = 0;
  int gap_sc_n = 0;
};

struct Summary {
  std::vector<AggregateRow> aggregate;
  std::vector<GapRow> gaps;
  std::vector<std::string> warnings;
};

struct RunOptions {
  bool deterministic = false;  // zero runtimes, no timestamp header
  int jobs = 1;
};

struct RunResult {
  std::vector<RawRow> raw;
  std::vector<TraceRow> trace;
  Summary summary;
  std::vector<std::string> errors;
  bool any_failure = false;
};

/// Runs every (sweep point, snapshot, method) of the spec. Snapshots run
/// concurrently over `jobs` threads; rows come back in canonical order.
RunResult run(const ExperimentSpec& spec, const RunOptions& options);

/// Aggregates and gap table recomputed from raw rows only.
Summary summarize(const std::vector<RawRow>& raw);

void write_raw_csv(std::ostream& out, const std::vector<RawRow>& rows);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows);
void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);
std::vector<RawRow> read_raw_csv(std::istream& in);

/// raw.csv, aggregate.csv, gaps.csv and trace.csv in `dir` (created if
/// needed). Each file starts with a timestamp comment unless deterministic.
void write_outputs(const RunResult& result, const std::string& dir, const RunOptions& options);

}  // namespace qnet::harness

#endif  // QNET_HARNESS_HPP
