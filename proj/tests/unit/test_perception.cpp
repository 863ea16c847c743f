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

#include "adas_sim/controllers.hpp"
#include "adas_sim/perception.hpp"
#include "adas_sim/scenario.hpp"
#include "doctest.h"

using namespace adas_sim;

TEST_CASE("ground-truth sensing on the grid speeds")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 60.0);
  const WorldState w = initial_world(spec, 3);
  const PerceptionFrame f = sense_ground_truth(w);
  CHECK(f.lead_detected);
  CHECK(f.reported_rd == doctest::Approx(60.0));
  CHECK(f.reported_rs == doctest::Approx(22.352 - 13.4112));
}

TEST_CASE("leads inside the detection floor or absent are invisible")
{
  ScenarioSpec close = builtin_scenario(ScenarioId::S1, 1.5);
  CHECK_FALSE(sense_ground_truth(initial_world(close, 1)).lead_detected);

  ScenarioSpec empty = builtin_scenario(ScenarioId::S1);
  empty.traffic.clear();
  empty.lead_profile.clear();
  const PerceptionFrame f = sense_ground_truth(initial_world(empty, 1));
  CHECK_FALSE(f.lead_detected);
  CHECK(std::isinf(f.reported_rd));
}

TEST_CASE("RD fault schedule uses the tightest satisfied threshold")
{
  FaultSpec spec;
  spec.kind = FaultKind::RelativeDistance;
  CHECK(50.0 + *rd_fault_value(spec, 50.0) == 60.0);
  CHECK(15.0 + *rd_fault_value(spec, 15.0) == 53.0);
  CHECK(22.0 + *rd_fault_value(spec, 22.0) == 37.0);
  CHECK_FALSE(rd_fault_value(spec, 90.0).has_value());
}

TEST_CASE("fault injector leaves fault-free frames untouched")
{
  const ScenarioSpec spec = builtin_scenario(ScenarioId::S1, 60.0);
  const WorldState w = initial_world(spec, 3);
  const PerceptionFrame f = sense_ground_truth(w);
  FaultInjector inj(FaultSpec{});
  const PerceptionFrame g = inj.apply(f, 0.0);
  CHECK(g.reported_rd == f.reported_rd);
  CHECK(g.reported_curvature == f.reported_curvature);
  CHECK_FALSE(inj.active());
  const PerceptionFrame indep = independent_sense(w);
  CHECK(indep.reported_rd == f.reported_rd);
  CHECK(indep.reported_rs == f.reported_rs);
}

TEST_CASE("curvature fault applies on the patch only")
{
  FaultSpec spec;
  spec.kind = FaultKind::DesiredCurvature;
  spec.patch_start = 100.0;
  spec.patch_length = 200.0;
  FaultInjector inj(spec);
  PerceptionFrame f;
  CHECK(inj.apply(f, 50.0).reported_curvature == 0.0);
  CHECK(inj.apply(f, 150.0).reported_curvature == doctest::Approx(0.003));
  CHECK(inj.curvature_active());
  CHECK(inj.apply(f, 350.0).reported_curvature == 0.0);
}

TEST_CASE("ACC request signs")
{
  AccParams p;
  VehicleState ego;
  ego.speed = 20.0;
  PerceptionFrame none;
  CHECK(acc_step(none, ego, p) > 0.0);

  PerceptionFrame spoofed;
  spoofed.lead_detected = true;
  spoofed.reported_rd = 500.0;
  spoofed.reported_rs = 0.0;
  CHECK(acc_step(spoofed, ego, p) > 0.0);

  PerceptionFrame eq;
  eq.lead_detected = true;
  eq.reported_rd = p.gap_target(20.0);
  eq.reported_rs = 0.0;
  ego.speed = 20.0;
  p.set_speed = 20.0;
  CHECK(acc_step(eq, ego, p) == doctest::Approx(0.0));
}

TEST_CASE("ALC request at equilibrium, at fault onset and off-center")
{
  VehicleState ego;
  PerceptionFrame centered;
  centered.lane_left = centered.lane_right = 0.95;
  AlcController alc;
  CHECK(alc.step(centered, ego) == 0.0);

  PerceptionFrame faulted = centered;
  faulted.reported_curvature = 0.003;
  AlcController onset;
  CHECK(onset.step(faulted, ego) == doctest::Approx(0.003));

  PerceptionFrame left;
  left.lane_left = 0.45;
  left.lane_right = 1.45;
  AlcController off;
  CHECK(off.step(left, ego) < 0.0);
}
