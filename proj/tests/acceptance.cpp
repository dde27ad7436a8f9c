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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Usage: acceptance [output_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lp_oracle.hpp"
#include "qnet/ao_optimizer.hpp"
#include "qnet/exact_oracle.hpp"
#include "qnet/fidelity.hpp"
#include "qnet/fso_channel.hpp"
#include "qnet/harness.hpp"
#include "qnet/monte_carlo.hpp"
#include "qnet/rng.hpp"

namespace fs = std::filesystem;
namespace h = qnet::harness;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

bool relative_agree(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

h::ExperimentSpec load(const std::string& name) {
  std::ifstream in(std::string(QNET_SOURCE_DIR) + "/configs/" + name);
  if (!in) throw std::runtime_error("missing config " + name);
  return h::parse_spec(in);
}

h::RunResult run_to(const h::ExperimentSpec& spec, const fs::path& dir, int jobs) {
  const h::RunOptions options{true, jobs};
  h::RunResult result = h::run(spec, options);
  h::write_outputs(result, dir.string(), options);
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Criterion 1: quadrature against 1e7-sample Monte Carlo.
Outcome channel_statistics() {
  Outcome out;
  const qnet::ChannelConfig cfg;
  double worst = 0.0;
  for (double d : {150.0, 250.0, 350.0, 450.0, 550.0}) {
    const qnet::LinkChannel link = qnet::characterize(cfg, qnet::LinkGeometry{d});
    const double quad = qnet::success_probability(link, cfg.eta_th);
    const auto stream = qnet::CounterRng::stream(static_cast<std::uint64_t>(d), qnet::StreamPurpose::kChannelSampling);
    const qnet::MonteCarloEstimate mc = qnet::estimate_success_probability(link, cfg.eta_th, 10'000'000, stream);
    const double tol = 3.0 * mc.std_error + 1e-3;
    const double err = std::abs(quad - mc.mean);
    worst = std::max(worst, err / tol);
    if (err > tol) {
      out.pass = false;
      out.detail += fmt("d=%g m quad=%.6g mc=%.6g tol=%.3g; ", d, quad, mc.mean, tol);
    }
  }
  out.detail += fmt("5 distances, worst |quad-mc|/tol = %.3f", worst);
  return out;
}

// Criterion 2: fidelity chain against the independent composition script.
Outcome fidelity_chain() {
  Outcome out;
  const qnet::FidelityConfig cfg;
  constexpr double kScript500 = 0.903312141463;  // tests/oracles/fidelity_chain.py
  const double f = qnet::end_to_end_fidelity(cfg, 500.0);
  if (std::abs(f - kScript500) > 1e-4) out.pass = false;
  double prev = 2.0;
  int grid = 0;
  for (double d = 150.0; d <= 550.0; d += 50.0, ++grid) {
    const double v = qnet::end_to_end_fidelity(cfg, d);
    if (!(v < prev) || v < 0.25 || v > 1.0) out.pass = false;
    prev = v;
  }
  if (grid != 9) out.pass = false;
  out.detail = fmt("F(500 m)=%.9f script=%.9f, 9-point grid 150..550 m checked", f, kScript500);
  return out;
}

// Criterion 3: simplex against vertex enumeration, with dual certificates.
Outcome lp_correctness() {
  Outcome out;
  qnet::CounterRng rng = qnet::CounterRng::stream(2026, qnet::StreamPurpose::kTest);
  int optimal = 0;
  int infeasible = 0;
  double worst_obj = 0.0, worst_dual = 0.0;
  // Draw until 20 instances have an optimum; infeasible draws must be
  // reported as such.
  while (optimal < 20) {
    const qnet::lp::LpProblem p = qnet::testing::random_lp(rng, 6, 6);
    const auto truth = qnet::testing::enumerate_vertices(p);
    const qnet::lp::LpSolution sol = qnet::lp::solve(p);
    if (!truth) {
      ++infeasible;
      if (sol.status != qnet::lp::LpStatus::kInfeasible) out.pass = false;
      continue;
    }
    ++optimal;
    if (sol.status != qnet::lp::LpStatus::kOptimal) {
      out.pass = false;
      continue;
    }
    const double err = std::abs(sol.objective_value - truth->value) / std::max(1.0, std::abs(truth->value));
    const qnet::lp::DualityReport dual = qnet::lp::check_duality(p, sol);
    const double cert = std::max({dual.max_dual_infeasibility, dual.max_complementarity, dual.duality_gap});
    worst_obj = std::max(worst_obj, err);
    worst_dual = std::max(worst_dual, cert);
    if (err > 1e-7 || cert > 1e-7 || qnet::lp::check_feasible(p, sol.z).max_violation > 1e-7) out.pass = false;
  }
  out.detail = fmt("%g LPs with optima (+%g infeasible), worst objective error %.2e, worst certificate residual %.2e",
                   optimal, infeasible, worst_obj, worst_dual);
  return out;
}

// Criterion 4: enumeration against branch and bound.
Outcome oracle_agreement(std::vector<std::pair<double, double>>& exact_pairs) {
  Outcome out;
  double worst = 0.0;
  int feasible = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    qnet::ScenarioConfig cfg;
    cfg.n_qbs = 3;
    cfg.n_qu = 4;
    cfg.seed = seed;
    const qnet::Scenario sc = qnet::generate_snapshot(cfg).scenario;
    double dc = 0.0, sc_obj = 0.0;
    for (qnet::Connectivity mode : {qnet::Connectivity::kDual, qnet::Connectivity::kSingle}) {
      const qnet::OracleResult e = qnet::enumerate_optimal(sc, mode);
      const qnet::OracleResult m = qnet::milp_reference(sc, mode);
      if (e.feasible != m.feasible) {
        out.pass = false;
        continue;
      }
      if (!e.feasible) continue;
      ++feasible;
      const double err = std::abs(e.objective - m.objective) / std::max(1.0, std::abs(e.objective));
      worst = std::max(worst, err);
      if (err > 1e-6) out.pass = false;
      (mode == qnet::Connectivity::kDual ? dc : sc_obj) = e.objective;
    }
    exact_pairs.emplace_back(dc, sc_obj);
  }
  out.detail = fmt("20 seeds x {DC, SC}: %g feasible pairs agree, worst relative difference %.2e", feasible, worst);
  return out;
}

// Criterion 5: AO quality against the exact optimum.
Outcome ao_quality(const fs::path& dir, std::vector<std::pair<double, double>>& exact_pairs) {
  Outcome out;
  const h::ExperimentSpec spec = load("ao_quality.conf");
  const h::RunResult result = run_to(spec, dir, 1);

  std::map<std::pair<std::uint64_t, std::string>, const h::RawRow*> rows;
  for (const h::RawRow& r : result.raw) rows[{r.seed, r.method}] = &r;
  int reported = 0, above = 0, residual_fail = 0, checked = 0;
  for (int s = 0; s < spec.snapshots; ++s) {
    const qnet::ScenarioConfig cfg = h::scenario_for(spec, 0.0, s);
    const qnet::Scenario sc = qnet::generate_snapshot(cfg).scenario;
    for (const char* m : {"DC", "SC"}) {
      const auto* ao = rows.at({cfg.seed, std::string("AO_") + m});
      const auto* ex = rows.at({cfg.seed, std::string("EXACT_") + m});
      if (ao->status != "ok") {
        ++reported;
        continue;
      }
      ++checked;
      qnet::AoConfig ao_cfg = spec.ao;
      ao_cfg.mode = m[0] == 'D' ? qnet::Connectivity::kDual : qnet::Connectivity::kSingle;
      const qnet::AoSolution sol = qnet::alternating_optimize(sc, ao_cfg);
      if (sol.objective != ao->objective || qnet::check_solution(sc, sol.x, sol.r, ao_cfg.mode).max() > 1e-6) {
        ++residual_fail;
      }
      if (ex->status != "ok" || ao->objective > ex->objective + 1e-6 * std::max(1.0, ex->objective)) ++above;
    }
    const auto* edc = rows.at({cfg.seed, "EXACT_DC"});
    const auto* esc = rows.at({cfg.seed, "EXACT_SC"});
    exact_pairs.emplace_back(edc->status == "ok" ? edc->objective : 0.0, esc->status == "ok" ? esc->objective : 0.0);
  }
  const h::GapRow& gap = result.summary.gaps.at(0);
  const double gap_dc = gap.gap_dc_pct.value_or(100.0);
  const double gap_sc = gap.gap_sc_pct.value_or(100.0);
  out.pass = above == 0 && residual_fail == 0 && gap_dc <= 25.0 && gap_sc <= 25.0 && !result.any_failure;
  out.detail = fmt("200 seeds: mean gap DC %.2f%% SC %.2f%%, %g AO solutions above exact", gap_dc, gap_sc, above) +
               fmt(", %g constraint failures over %g checked, %g reported infeasible", residual_fail, checked,
                   reported);
  return out;
}

// Criterion 6: DC against SC.
Outcome dc_vs_sc(const fs::path& dir, const std::vector<std::pair<double, double>>& exact_pairs) {
  Outcome out;
  int exact_violations = 0;
  for (const auto& [dc, sc] : exact_pairs) {
    if (dc < sc * (1.0 - 1e-9)) ++exact_violations;
  }
  const h::ExperimentSpec spec = load("dc_vs_sc.conf");
  const h::RunResult result = run_to(spec, dir, 1);
  std::map<std::uint64_t, std::pair<double, double>> per_seed;
  for (const h::RawRow& r : result.raw) {
    const double v = r.status == "ok" ? r.objective : 0.0;
    (r.method == "AO_DC" ? per_seed[r.seed].first : per_seed[r.seed].second) = v;
  }
  int ao_violations = 0;
  for (const auto& [seed, p] : per_seed) {
    if (p.first < p.second - 1e-6 * std::max(1.0, p.second)) ++ao_violations;
  }
  double mean_dc = 0.0, mean_sc = 0.0;
  for (const h::AggregateRow& a : result.summary.aggregate) (a.method == "AO_DC" ? mean_dc : mean_sc) = a.mean_all;
  const double pct = result.summary.gaps.at(0).dc_over_sc_pct.value_or(0.0);
  const int seeds = static_cast<int>(per_seed.size());
  out.pass = exact_violations == 0 && mean_dc > mean_sc && ao_violations <= seeds / 20 && !result.any_failure;
  out.detail = fmt("exact DC < SC on %g of %g instances; AO mean DC %.4g vs SC %.4g pairs/s", exact_violations,
                   static_cast<double>(exact_pairs.size()), mean_dc, mean_sc) +
               fmt(" (+%.2f%%); AO DC < SC on %g of %g seeds", pct, ao_violations, seeds);
  return out;
}

// Criterion 7: outer-loop convergence.
Outcome convergence(const fs::path& dir) {
  Outcome out;
  const h::ExperimentSpec spec = load("convergence.conf");
  const h::RunResult result = run_to(spec, dir, 1);
  std::map<std::uint64_t, std::vector<const h::TraceRow*>> traces;
  for (const h::TraceRow& t : result.trace) traces[t.seed].push_back(&t);
  int within = 0;
  std::vector<int> first_hit;
  for (const auto& [seed, rows] : traces) {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& prev = rows[i - 1]->record;
      const auto& cur = rows[i]->record;
      if (cur.iteration > 15) break;
      if (prev.feasible && cur.feasible &&
          std::abs(cur.objective - prev.objective) < 1e-4 * std::max(std::abs(prev.objective), 1e-12)) {
        ++within;
        first_hit.push_back(cur.iteration);
        break;
      }
    }
  }
  std::sort(first_hit.begin(), first_hit.end());
  const double median = first_hit.empty() ? 0.0 : first_hit[first_hit.size() / 2];
  const double worst = first_hit.empty() ? 0.0 : first_hit.back();
  out.pass = within >= 90 && traces.size() == 100 && fs::exists(dir / "trace.csv");
  out.detail = fmt("%g of 100 seeds converge within 15 iterations (median %g, max %g); trace at ", within, median,
                   worst) +
               (dir / "trace.csv").string();
  return out;
}

// Criterion 8: byte-identical reruns of criteria 5-7.
Outcome determinism(const fs::path& first, const fs::path& second) {
  Outcome out;
  int files = 0;
  struct Job {
    const char* config;
    const char* sub;
  };
  for (const Job& job : {Job{"ao_quality.conf", "criterion5"}, Job{"dc_vs_sc.conf", "criterion6"},
                         Job{"convergence.conf", "criterion7"}}) {
    run_to(load(job.config), second / job.sub, 2);
    for (const char* name : {"raw.csv", "aggregate.csv", "gaps.csv", "trace.csv"}) {
      ++files;
      if (slurp(first / job.sub / name) != slurp(second / job.sub / name)) {
        out.pass = false;
        out.detail += std::string(job.sub) + "/" + name + " differs; ";
      }
    }
  }
  out.detail += fmt("%g CSV files compared between a 1-job run and a 2-job rerun", files);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const fs::path first = root / "run1";
  const fs::path second = root / "run2";
  fs::remove_all(root);

  std::vector<std::pair<double, double>> exact_pairs;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"channel statistics", channel_statistics},
      {"fidelity chain", fidelity_chain},
      {"LP solver", lp_correctness},
      {"exact oracles agree", [&] { return oracle_agreement(exact_pairs); }},
      {"AO quality", [&] { return ao_quality(first / "criterion5", exact_pairs); }},
      {"DC vs SC", [&] { return dc_vs_sc(first / "criterion6", exact_pairs); }},
      {"convergence", [&] { return convergence(first / "criterion7"); }},
      {"determinism", [&] { return determinism(first, second); }},
  };

  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d %s: %s (%.1f s) %s\n", index, o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", index - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
