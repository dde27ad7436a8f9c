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

// Serial reference kernels against their OpenMP counterparts.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "qnet/fso_channel.hpp"
#include "qnet/harness.hpp"
#include "qnet/monte_carlo.hpp"
#include "qnet/scenario.hpp"

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-28s %12.2f %12.2f %8.2fx  %s\n", name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
  std::printf("%-28s %12s %12s %9s\n", "kernel", "serial ms", "openmp ms", "speedup");

  {
    const qnet::ChannelConfig cfg;
    const qnet::LinkChannel link = qnet::characterize(cfg, qnet::LinkGeometry{350.0});
    const auto stream = qnet::CounterRng::stream(7, qnet::StreamPurpose::kChannelSampling);
    const std::uint64_t samples = 10'000'000;
    qnet::MonteCarloEstimate a, b;
    const double ts = best_of(reps, [&] { a = qnet::estimate_success_probability_serial(link, cfg.eta_th, samples, stream); });
    const double tp = best_of(reps, [&] { b = qnet::estimate_success_probability(link, cfg.eta_th, samples, stream); });
    report("monte carlo 1e7 @ 350 m", ts, tp, a.mean == b.mean && a.std_error == b.std_error);
  }

  {
    qnet::ScenarioConfig cfg;
    cfg.n_qbs = 10;
    cfg.n_qu = 40;
    qnet::Scenario s1 = qnet::generate(cfg);
    qnet::Scenario s2 = s1;
    const double ts = best_of(reps, [&] { qnet::compute_links_serial(s1, cfg.channel, cfg.fidelity); });
    const double tp = best_of(reps, [&] { qnet::compute_links(s2, cfg.channel, cfg.fidelity); });
    bool same = true;
    for (std::size_t k = 0; k < s1.links.size(); ++k) {
      same = same && s1.links[k].success_probability == s2.links[k].success_probability &&
             s1.links[k].fidelity == s2.links[k].fidelity;
    }
    report("link matrix 10 x 40", ts, tp, same);
  }

  {
    qnet::harness::ExperimentSpec spec;
    spec.snapshots = 16;
    spec.compare = {qnet::harness::Method::kAoDc, qnet::harness::Method::kAoSc};
    spec.scenario.n_qbs = 6;
    spec.scenario.n_qu = 12;
    qnet::harness::RunOptions serial{true, 1};
    qnet::harness::RunOptions parallel{true, omp_get_max_threads()};
    qnet::harness::RunResult a, b;
    const double ts = best_of(reps, [&] { a = qnet::harness::run(spec, serial); });
    const double tp = best_of(reps, [&] { b = qnet::harness::run(spec, parallel); });
    bool same = a.raw.size() == b.raw.size();
    for (std::size_t i = 0; same && i < a.raw.size(); ++i) same = a.raw[i].objective == b.raw[i].objective;
    report("snapshots 16 x AO (6 x 12)", ts, tp, same);
  }
  return 0;
}
