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

// qnet: experiment driver for the dual-connectivity entanglement-rate study.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "qnet/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMethodFailure = 1;
constexpr int kExitSpecError = 2;

void print_gaps(const qnet::harness::Summary& summary) {
  qnet::harness::write_gap_csv(std::cout, summary.gaps);
  for (const auto& w : summary.warnings) std::cerr << "warning: " << w << '\n';
}

int run_command(const std::string& spec_path, const std::string& out_dir, bool deterministic, int jobs) {
  namespace h = qnet::harness;
  h::ExperimentSpec spec;
  try {
    std::ifstream in(spec_path);
    if (!in) throw h::SpecError("cannot open spec file " + spec_path);
    spec = h::parse_spec(in, h::qnet_environment());
    if (jobs < 1) throw h::SpecError("--jobs must be >= 1");
  } catch (const std::exception& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kExitSpecError;
  }
  h::RunOptions options;
  options.deterministic = deterministic;
  options.jobs = jobs;
  const h::RunResult result = h::run(spec, options);
  h::write_outputs(result, out_dir, options);
  for (const auto& e : result.errors) std::cerr << "method failure: " << e << '\n';
  print_gaps(result.summary);
  std::cerr << result.raw.size() << " rows written to " << out_dir << '\n';
  return result.any_failure ? kExitMethodFailure : kExitOk;
}

int summarize_command(const std::string& raw_path, const std::string& out_dir) {
  namespace h = qnet::harness;
  std::vector<h::RawRow> rows;
  try {
    std::ifstream in(raw_path);
    if (!in) throw h::SpecError("cannot open " + raw_path);
    rows = h::read_raw_csv(in);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitSpecError;
  }
  const h::Summary summary = h::summarize(rows);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream agg(std::filesystem::path(out_dir) / "aggregate.csv", std::ios::binary);
    h::write_aggregate_csv(agg, summary.aggregate);
    std::ofstream gaps(std::filesystem::path(out_dir) / "gaps.csv", std::ios::binary);
    h::write_gap_csv(gaps, summary.gaps);
  }
  print_gaps(summary);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement-rate optimization experiments for dual-connectivity FSO quantum networks"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_dir;
  bool deterministic = false;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run an experiment spec and write CSV results");
  run->add_option("--spec", spec_path, "Experiment spec file (key = value)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_flag("--deterministic", deterministic, "Zero runtimes and omit timestamp headers");
  run->add_option("--jobs", jobs, "Snapshots evaluated concurrently")->default_val(1);

  std::string raw_path;
  std::string summary_dir;
  auto* summarize = app.add_subcommand("summarize", "Recompute aggregates and gap table from a raw CSV");
  summarize->add_option("--raw", raw_path, "raw.csv from a previous run")->required();
  summarize->add_option("--out", summary_dir, "Also write aggregate.csv and gaps.csv here");

  auto* version = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSpecError;
  }

  try {
    if (*run) return run_command(spec_path, out_dir, deterministic, jobs);
    if (*summarize) return summarize_command(raw_path, summary_dir);
    if (*version) {
      std::cout << "qnet " << QNET_VERSION << '\n';
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMethodFailure;
  }
  return kExitOk;
}
