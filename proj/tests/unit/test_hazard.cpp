// Copyright 2026 The adas-sim Authors
//
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

#include <cmath>

#include "adas_sim/hazard.hpp"
#include "adas_sim/scenario.hpp"
#include "adas_sim/simulation.hpp"
#include "doctest.h"

using namespace adas_sim;

namespace
{

bool has(const std::vector<HazardEvent> & events, HazardKind kind)
{
  for (const auto & e : events) {
    if (e.kind == kind) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("headway hazard on truth")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 10.0);
  WorldState w = initial_world(spec, 1);
  w.ego.speed = 22.35;
  const auto ev = detect_hazards(w, {});
  CHECK(has(ev, HazardKind::H1));
  CHECK_FALSE(has(ev, HazardKind::A1));
}

TEST_CASE("lane-line hazard")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 100.0);
  WorldState w = initial_world(spec, 1);
  w.ego_frenet.d = 0.87;  // left line 0.08 m away
  CHECK(has(detect_hazards(w, {}), HazardKind::H2));
}

TEST_CASE("quiescent world has no hazards")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 100.0);
  WorldState w = initial_world(spec, 1);
  w.ego.speed = 13.0;
  CHECK(detect_hazards(w, {}).empty());
}

TEST_CASE("H1 is edge triggered and accidents latch")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 10.0);
  WorldState w = initial_world(spec, 1);
  HazardMonitor m;
  CHECK(m.step(w).size() == 1);
  CHECK(m.step(w).empty());
}

TEST_CASE("finalize_metrics on a synthetic log")
{
  RunLog log;
  log.meta.fault = "rd";
  for (int k = 0; k < 3000; ++k) {
    StepRecord r;
    r.step = k;
    r.t = k * kDt;
    r.speed = 20.0;
    log.records.push_back(r);
  }
  log.events.push_back({1000, 10.0, "aeb_stage", "FcwAlert", 1.0});
  log.events.push_back({2000, 20.0, "fault", "rd", 1.0});
  log.events.push_back({2330, 23.3, "aeb_brake", "Brake90", -8.82});
  const RunResult r = finalize_metrics(log);
  CHECK(r.outcome == Outcome::NoAccident);
  CHECK(r.hardest_brake == 0.0);
  CHECK(r.fault_activation == 20.0);
  CHECK(r.trigger(Trigger::Aeb).fired);
  CHECK(r.trigger(Trigger::Aeb).mitigation_time == doctest::Approx(3.3));
  CHECK_FALSE(r.trigger(Trigger::DriverBrake).fired);
  CHECK(std::isnan(r.trigger(Trigger::DriverBrake).mitigation_time));
  CHECK(r.prevented());
}

TEST_CASE("finalize_metrics rejects an empty log")
{
  CHECK_THROWS_AS(finalize_metrics(RunLog{}), HarnessFault);
}

TEST_CASE("an accident ends the run with the accident frame logged")
{
  RunSpec s;
  s.seed = 11;
  s.scenario = builtin_scenario(ScenarioId::S1, 60.0);
  s.fault.kind = FaultKind::RelativeDistance;
  const RunLog log = simulate(s);
  const RunResult r = finalize_metrics(log);
  REQUIRE(r.outcome == Outcome::A1);
  const HazardEvent & last = log.hazards.back();
  CHECK(last.kind == HazardKind::A1);
  CHECK(static_cast<std::int64_t>(log.records.size()) == last.step + 1);
  CHECK(log.records.back().step == last.step);

  bool h1_before = false;
  for (const auto & h : log.hazards) h1_before = h1_before || (h.kind == HazardKind::H1 && h.step < last.step);
  CHECK(h1_before);
}

TEST_CASE("the accident frame keeps the previous command and its source")
{
  RunSpec s;
  s.seed = 11;
  s.scenario = builtin_scenario(ScenarioId::S1, 60.0);
  s.fault.kind = FaultKind::RelativeDistance;
  s.interventions = InterventionConfig::parse("driver,safety-check");
  const RunLog log = simulate(s);
  REQUIRE(log.records.size() >= 2);
  const StepRecord & prev = log.records[log.records.size() - 2];
  const StepRecord & last = log.records.back();
  CHECK(last.accel == prev.accel);
  CHECK(last.long_source == prev.long_source);
  CHECK(last.lat_source == prev.lat_source);
  const RunResult r = finalize_metrics(log);
  CHECK(r.sw_accel_min >= -3.5);
}

TEST_CASE("fault-free runs last exactly 10,000 steps")
{
  RunSpec s;
  s.seed = 5;
  s.scenario = builtin_scenario(ScenarioId::S2, 230.0);
  const RunLog log = simulate(s);
  CHECK(log.records.size() == 10000);
  CHECK(finalize_metrics(log).outcome == Outcome::NoAccident);
}

TEST_CASE("identical specs give identical logs")
{
  RunSpec s;
  s.seed = 99;
  s.scenario = builtin_scenario(ScenarioId::S5, 60.0);
  s.fault.kind = FaultKind::Mixed;
  s.interventions = InterventionConfig::parse("driver,aeb-comp");
  const RunLog a = simulate(s);
  const RunLog b = simulate(s);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].speed == b.records[i].speed);
  }
}
