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

#include <sstream>
#include <string>

#include "doctest.h"
#include "qnet/scenario.hpp"

using namespace qnet;

namespace {

ScenarioConfig small_config(std::uint64_t seed, int nq = 3, int nu = 4) {
  ScenarioConfig cfg;
  cfg.n_qbs = nq;
  cfg.n_qu = nu;
  cfg.seed = seed;
  return cfg;
}

std::string dump(const Scenario& s) {
  std::ostringstream ss;
  write_scenario(ss, s);
  return ss.str();
}

Scenario single_link(double d, double fmin) {
  Scenario s;
  s.qbs = {{0.0, 0.0}};
  s.qu = {{d, 0.0}};
  s.rmax = {1e7};
  s.rmin = {3e3};
  s.fmin = {fmin};
  compute_links(s, ChannelConfig{}, FidelityConfig{});
  return s;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
  const Scenario a = generate(small_config(17));
  const Scenario b = generate(small_config(17));
  CHECK(dump(a) == dump(b));
  CHECK(dump(a) != dump(generate(small_config(18))));
}

TEST_CASE("all link distances fall in the configured range") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = generate(small_config(seed, 10, 20));
    REQUIRE(s.links.size() == 200);
    for (const LinkStats& l : s.links) {
      CHECK(l.distance_m >= 150.0);
      CHECK(l.distance_m <= 550.0);
    }
    for (int attempts : s.placement_attempts) CHECK(attempts >= 1);
  }
}

TEST_CASE("shape") {
  const Scenario s = generate(small_config(3, 2, 1));
  CHECK(s.links.size() == 2);
  CHECK(s.n_qbs() == 2);
  CHECK(s.n_qu() == 1);
}

TEST_CASE("drawn values stay inside their ranges") {
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const ScenarioConfig cfg = small_config(seed);
    const Scenario s = generate(cfg);
    for (const Point& p : s.qbs) {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= cfg.area_side_m);
      CHECK(p.y >= 0.0);
      CHECK(p.y <= cfg.area_side_m);
    }
    for (const Point& p : s.qu) {
      CHECK(p.x >= 0.0);
      CHECK(p.x <= cfg.area_side_m);
    }
    for (double r : s.rmax) CHECK((r >= cfg.rmax.lo && r <= cfg.rmax.hi));
    for (double r : s.rmin) CHECK((r >= cfg.rmin.lo && r <= cfg.rmin.hi));
    for (double f : s.fmin) CHECK((f >= cfg.fmin.lo && f <= cfg.fmin.hi));
    for (const LinkStats& l : s.links) {
      CHECK(l.success_probability >= 0.0);
      CHECK(l.success_probability <= 1.0);
      CHECK(l.fidelity >= 0.25);
      CHECK(l.fidelity <= 1.0);
    }
    for (std::size_t n = 0; n < s.n_qbs(); ++n) {
      for (std::size_t j = 0; j < s.n_qu(); ++j) {
        CHECK(s.link(n, j).eligible == (s.link(n, j).fidelity >= s.fmin[j]));
      }
    }
  }
}

TEST_CASE("parallel link kernel equals the serial reference") {
  Scenario a = generate(small_config(5, 6, 12));
  Scenario b = a;
  compute_links(a, ChannelConfig{}, FidelityConfig{});
  compute_links_serial(b, ChannelConfig{}, FidelityConfig{});
  CHECK(dump(a) == dump(b));
}

TEST_CASE("eligibility mask") {
  Scenario s = generate(small_config(8));
  s.fmin.assign(s.n_qu(), 0.25);
  for (bool e : eligibility_mask(s)) CHECK(e);
  s.fmin[1] = 1.0;
  const auto mask = eligibility_mask(s);
  for (std::size_t n = 0; n < s.n_qbs(); ++n) CHECK_FALSE(mask[n * s.n_qu() + 1]);

  const Scenario at500 = single_link(500.0, 0.89);
  CHECK(end_to_end_fidelity(FidelityConfig{}, 500.0) >= 0.89);
  CHECK(eligibility_mask(at500)[0]);
  CHECK(at500.link(0, 0).eligible);
  CHECK_FALSE(eligibility_mask(single_link(500.0, 0.91))[0]);
}

TEST_CASE("raising fmin never makes a link eligible") {
  Scenario s = generate(small_config(21, 4, 6));
  auto before = eligibility_mask(s);
  for (int step = 0; step < 20; ++step) {
    for (double& f : s.fmin) f = std::min(0.999, f + 0.01);
    const auto after = eligibility_mask(s);
    for (std::size_t k = 0; k < after.size(); ++k) {
      if (!before[k]) CHECK_FALSE(after[k]);
    }
    before = after;
  }
}

TEST_CASE("feasibility screen") {
  Scenario s = single_link(200.0, 0.99);
  FeasibilityReport r = is_potentially_feasible(s);
  CHECK_FALSE(r.feasible);
  CHECK(r.reason == "no eligible QBS");
  CHECK(r.qu == 0);

  s.rmin = {0.0};
  CHECK(is_potentially_feasible(s).feasible);

  Scenario ok = single_link(150.0, 0.8);
  CHECK(is_potentially_feasible(ok).feasible);
  ok.rmin = {2e7};  // beyond rmax * s
  CHECK_FALSE(is_potentially_feasible(ok).feasible);

  // Aggregate screen: two QUs whose individual demands fit but whose total
  // exceeds the only QBS's capacity.
  Scenario agg;
  agg.qbs = {{0.0, 0.0}};
  agg.qu = {{150.0, 0.0}, {0.0, 150.0}};
  agg.rmax = {1e4};
  agg.rmin = {6e3, 6e3};
  agg.fmin = {0.8, 0.8};
  compute_links(agg, ChannelConfig{}, FidelityConfig{});
  const FeasibilityReport ar = is_potentially_feasible(agg);
  CHECK_FALSE(ar.feasible);
  CHECK(ar.qu == -1);
}

TEST_CASE("snapshot policies") {
  ScenarioConfig cfg = small_config(4);
  const GeneratedSnapshot g = generate_snapshot(cfg);
  CHECK(g.screen.feasible);
  CHECK(is_potentially_feasible(g.scenario).feasible);

  ScenarioConfig hard = small_config(4);
  hard.fmin = {0.985, 0.99};  // unreachable beyond ~75 m
  hard.max_snapshot_retries = 5;
  CHECK_THROWS_AS(generate_snapshot(hard), GenerationError);
  hard.infeasible_policy = InfeasiblePolicy::kReport;
  const GeneratedSnapshot rep = generate_snapshot(hard);
  CHECK_FALSE(rep.screen.feasible);
  CHECK(rep.rejected == 0);
}

TEST_CASE("placement budget exhaustion names the range") {
  ScenarioConfig cfg = small_config(1);
  cfg.distance_m = {900.0, 1000.0};
  cfg.max_placement_attempts = 50;
  try {
    generate(cfg);
    FAIL("expected GenerationError");
  } catch (const GenerationError& e) {
    CHECK(std::string(e.what()).find("[900, 1000]") != std::string::npos);
  }
}

TEST_CASE("config validation") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.n_qu = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.rmin = {5.0, 1.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = ScenarioConfig{};
  cfg.fmin = {0.8, 1.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("text format round trip") {
  for (std::uint64_t seed : {2u, 9u, 31u}) {
    const Scenario s = generate(small_config(seed, 4, 5));
    std::istringstream in(dump(s));
    const Scenario t = read_scenario(in);
    CHECK(dump(t) == dump(s));
    CHECK(t.rmax == s.rmax);
    CHECK(t.links.size() == s.links.size());
    CHECK(t.link(3, 4).success_probability == s.link(3, 4).success_probability);
  }
  std::istringstream bad("qnet-scenario 1\nscenario 1 1 1\nqu 0 1 2 3 0.9 1\n");
  CHECK_THROWS_AS(read_scenario(bad), std::invalid_argument);
}
