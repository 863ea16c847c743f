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

#include "adas_sim/safety.hpp"
#include "doctest.h"

using namespace adas_sim;

TEST_CASE("TTC")
{
  CHECK(compute_ttc(30.0, 10.0) == 3.0);
  CHECK(std::isinf(compute_ttc(30.0, -2.0)));
  CHECK(compute_ttc(60.0, 8.94) == doctest::Approx(6.71).epsilon(1e-3));
  CHECK(std::isinf(compute_ttc(kInfinity, 5.0)));
  CHECK_THROWS_AS(compute_ttc(-1.0, 1.0), HarnessFault);
}

TEST_CASE("AEBS thresholds match hand evaluation")
{
  const AebsThresholds t = aebs_thresholds(22.352, 4.5, 2.5);
  CHECK(t.t_fcw == doctest::Approx(7.467).epsilon(1e-4));
  CHECK(t.t_pb1 == doctest::Approx(5.882).epsilon(1e-4));
  CHECK(t.t_pb2 == doctest::Approx(3.854).epsilon(1e-4));
  CHECK(t.t_fb == doctest::Approx(2.281).epsilon(1e-4));

  const AebsThresholds z = aebs_thresholds(0.0, 4.5, 2.5);
  CHECK(z.t_fcw == 2.5);
  CHECK(z.t_pb1 == 0.0);
  CHECK(z.t_fb == 0.0);

  CHECK(aebs_thresholds(13.411, 4.5, 2.5).t_fb == doctest::Approx(1.368).epsilon(1e-3));
  CHECK_THROWS_AS(aebs_thresholds(10.0, 0.0, 2.5), ConfigError);
}

TEST_CASE("stage intervals")
{
  const AebsThresholds t = aebs_thresholds(22.352, 4.5, 2.5);
  CHECK(stage_for_ttc(5.0, t) == AebStage::Brake90);
  CHECK(stage_for_ttc(1.0, t) == AebStage::Brake100);
  CHECK(stage_for_ttc(kInfinity, t) == AebStage::Inactive);
  CHECK(stage_for_ttc(t.t_pb1, t) == AebStage::FcwAlert);
  CHECK(stage_for_ttc(t.t_pb1 - 1e-9, t) == AebStage::Brake90);
}

TEST_CASE("AEB latches once braking")
{
  AebsState s;
  s.enabled = true;
  PerceptionFrame f;
  f.lead_detected = true;
  f.reported_rd = 10.0;
  f.reported_rs = 5.0;  // TTC 2.0 at v 22.352 -> Brake100
  AebsOutput o = aebs_step(s, f, 22.352);
  REQUIRE(o.command);
  CHECK(o.state.stage == AebStage::Brake100);
  CHECK(*o.command->accel_request == doctest::Approx(-9.8));

  PerceptionFrame gone;
  o = aebs_step(o.state, gone, 5.0);
  CHECK(o.state.stage == AebStage::Brake100);
  CHECK(o.command.has_value());

  AebsState off;
  off.enabled = false;
  CHECK_FALSE(aebs_step(off, f, 22.352).command.has_value());
}

TEST_CASE("safety_check clamp")
{
  SafetyCheckParams p;
  auto clamp = [&p](double a) {
    ControlCommand c;
    c.accel_request = a;
    return *safety_check(c, p).accel_request;
  };
  CHECK(clamp(3.0) == 2.0);
  CHECK(clamp(-5.0) == -3.5);
  CHECK(clamp(1.0) == 1.0);
}

namespace
{

DriverObservation calm(std::int64_t step)
{
  DriverObservation o;
  o.step = step;
  o.t = step * kDt;
  o.v_ego = 20.0;
  o.speed_limit = 22.352;
  o.rd = 100.0;
  o.rs = 0.0;
  o.gap_target = 33.0;
  o.lane_left = 0.95;
  o.lane_right = 0.95;
  return o;
}

}  // namespace

TEST_CASE("driver actions start exactly T_react after the trigger")
{
  DriverParams p;
  p.t_react = 2.5;
  DriverState s;
  std::int64_t started = -1;
  for (std::int64_t k = 1100; k < 1600; ++k) {
    DriverObservation o = calm(k);
    o.fcw_alert = k == 1200;
    DriverOutput out = driver_step(s, o, p);
    s = out.state;
    if (started < 0 && out.command) started = k;
  }
  CHECK(started == 1450);
}

TEST_CASE("lane proximity triggers steering after T_react")
{
  DriverParams p;
  DriverState s;
  std::int64_t started = -1;
  for (std::int64_t k = 3000; k < 3300; ++k) {
    DriverObservation o = calm(k);
    if (k >= 3000 && started < 0) {
      o.lane_left = 0.4;
      o.lane_right = 1.5;
      o.center_offset = 0.55;
    }
    DriverOutput out = driver_step(s, o, p);
    s = out.state;
    if (started < 0 && out.command && out.command->curvature_request) started = k;
  }
  CHECK(started == 3250);
}

TEST_CASE("quiet driver does nothing")
{
  DriverState s;
  const DriverOutput out = driver_step(s, calm(10), DriverParams{});
  CHECK_FALSE(out.command.has_value());
  CHECK(out.events.empty());
  CHECK(out.state.pending.empty());
}

TEST_CASE("intervention list parsing")
{
  const InterventionConfig c = InterventionConfig::parse("driver, aeb-indep");
  CHECK(c.driver);
  CHECK(c.aeb == AebMode::Independent);
  CHECK_FALSE(c.ml);
  CHECK(c.describe() == "driver,aeb-indep");
  CHECK(InterventionConfig::parse("none").describe() == "none");
  CHECK_THROWS_AS(InterventionConfig::parse("aeb-comp,aeb-indep"), ConfigError);
  CHECK_THROWS_AS(InterventionConfig::parse("autopilot"), ConfigError);
}

TEST_CASE("arbitration priorities")
{
  ControlCommand adas;
  adas.accel_request = 1.0;
  adas.curvature_request = 0.003;
  ControlCommand aeb;
  aeb.source = CommandSource::AEB;
  aeb.accel_request = -9.8;
  ControlCommand brake;
  brake.source = CommandSource::Driver;
  brake.accel_request = -5.0;
  ControlCommand steer;
  steer.source = CommandSource::Driver;
  steer.curvature_request = -0.001;
  InterventionConfig cfg = InterventionConfig::parse("driver,safety-check,aeb-indep");

  ArbitratedCommand a = arbitrate(aeb, brake, std::nullopt, adas, cfg, {});
  CHECK(a.long_source == CommandSource::AEB);
  CHECK(a.accel == -9.8);

  a = arbitrate(std::nullopt, steer, std::nullopt, adas, cfg, {});
  CHECK(a.lat_source == CommandSource::Driver);
  CHECK(a.curvature == -0.001);
  CHECK(a.long_source == CommandSource::ADAS);

  ControlCommand hot = adas;
  hot.accel_request = 3.0;
  a = arbitrate(std::nullopt, std::nullopt, std::nullopt, hot, cfg, {});
  CHECK(a.accel == 2.0);
  CHECK(a.clamped);
}
