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

#include "adas_sim/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "adas_sim/controllers.hpp"
#include "adas_sim/scenario.hpp"

namespace adas_sim
{

std::string to_string(HazardKind kind)
{
  switch (kind) {
    case HazardKind::H1: return "H1";
    case HazardKind::H2: return "H2";
    case HazardKind::A1: return "A1";
    case HazardKind::A2: return "A2";
  }
  return "H1";
}

double truth_forward_gap(const WorldState & world, VehicleId * who)
{
  double best = kInfinity;
  for (const auto & v : world.traffic) {
    const double dd = std::abs(v.frenet.d - world.ego_frenet.d);
    if (dd >= 0.5 * (world.ego.width + v.state.width)) continue;
    if (v.frenet.s <= world.ego_frenet.s) continue;
    const double gap = bumper_gap(world, v);
    if (gap < best) {
      best = gap;
      if (who != nullptr) *who = v.state.id;
    }
  }
  return best;
}

std::vector<HazardEvent> detect_hazards(const WorldState & world, const HazardParams & params)
{
  std::vector<HazardEvent> out;
  const LaneOffset lane = lateral_offset(world, kEgoId);
  const double gap = truth_forward_gap(world);
  auto make = [&](HazardKind kind, std::string detail) {
    HazardEvent e;
    e.step = world.step_index;
    e.t = world.t;
    e.kind = kind;
    e.detail = std::move(detail);
    e.truth_rd = gap;
    e.lane_offset = lane.center_offset;
    return e;
  };

  if (gap < world.ego.speed * params.headway) out.push_back(make(HazardKind::H1, "headway"));
  if (lane.left <= params.line_margin) out.push_back(make(HazardKind::H2, "left line"));
  if (lane.right <= params.line_margin) out.push_back(make(HazardKind::H2, "right line"));

  bool rear_end = false;
  bool side = false;
  VehicleId hit = -1;
  for (const auto & v : world.traffic) {
    const double ds = v.frenet.s - world.ego_frenet.s;
    const double dd = std::abs(v.frenet.d - world.ego_frenet.d);
    const double half_l = 0.5 * (world.ego.length + v.state.length);
    if (std::abs(ds) >= half_l || dd >= 0.5 * (world.ego.width + v.state.width)) continue;
    hit = v.state.id;
    if (ds > 0.0 && half_l - ds <= params.front_contact) {
      rear_end = true;
    } else {
      side = true;
    }
  }
  if (rear_end) {
    out.push_back(make(HazardKind::A1, "forward collision with vehicle " + std::to_string(hit)));
  } else if (side) {
    out.push_back(make(HazardKind::A2, "side contact with vehicle " + std::to_string(hit)));
  } else if (lane.out_of_lane) {
    out.push_back(make(HazardKind::A2, "lane departure"));
  }
  return out;
}

std::vector<HazardEvent> HazardMonitor::step(const WorldState & world)
{
  std::vector<HazardEvent> out;
  if (accident_) return out;
  bool h1 = false;
  bool h2 = false;
  for (auto & e : detect_hazards(world, params_)) {
    switch (e.kind) {
      case HazardKind::H1:
        h1 = true;
        if (!h1_) out.push_back(e);
        break;
      case HazardKind::H2:
        if (!h2 && !h2_) out.push_back(e);
        h2 = true;
        break;
      case HazardKind::A1:
      case HazardKind::A2:
        accident_ = true;
        out.push_back(e);
        break;
    }
  }
  h1_ = h1;
  h2_ = h2;
  return out;
}

std::string to_string(Outcome outcome)
{
  switch (outcome) {
    case Outcome::NoAccident: return "NoAccident";
    case Outcome::A1: return "A1";
    case Outcome::A2: return "A2";
    case Outcome::Invalid: return "Invalid";
  }
  return "Invalid";
}

Outcome outcome_from_string(const std::string & name)
{
  if (name == "NoAccident") return Outcome::NoAccident;
  if (name == "A1") return Outcome::A1;
  if (name == "A2") return Outcome::A2;
  if (name == "Invalid") return Outcome::Invalid;
  throw ConfigError("unknown outcome '" + name + "'");
}

std::string to_string(Trigger trigger)
{
  switch (trigger) {
    case Trigger::Aeb: return "aeb";
    case Trigger::DriverBrake: return "driver_brake";
    case Trigger::DriverSteer: return "driver_steer";
    case Trigger::Ml: return "ml";
    case Trigger::SafetyCheck: return "safety_check";
  }
  return "aeb";
}

namespace
{

std::optional<Trigger> trigger_of(const LogEvent & e)
{
  if (e.signal == "aeb_brake") return Trigger::Aeb;
  if (e.signal == "driver_trigger") {
    return e.source == "EmergencyBrake" ? Trigger::DriverBrake : Trigger::DriverSteer;
  }
  if (e.signal == "ml_recovery" && e.value > 0.0) return Trigger::Ml;
  if (e.signal == "safety_clamp") return Trigger::SafetyCheck;
  return std::nullopt;
}

}  // namespace

RunResult finalize_metrics(const RunLog & log)
{
  RunResult r;
  r.meta = log.meta;
  r.hazards = log.hazards;
  r.fault_armed = log.meta.fault != "none";
  if (!log.invalid_reason.empty()) {
    r.outcome = Outcome::Invalid;
    r.invalid_reason = log.invalid_reason;
    r.steps = static_cast<std::int64_t>(log.records.size());
    return r;
  }
  if (log.records.empty()) throw HarnessFault("finalize_metrics: empty log");

  r.steps = static_cast<std::int64_t>(log.records.size());
  r.end_time = log.records.back().t;

  for (const auto & h : log.hazards) {
    if (h.kind == HazardKind::H1) ++r.h1_count;
    if (h.kind == HazardKind::H2) ++r.h2_count;
    if (r.outcome == Outcome::NoAccident && h.kind == HazardKind::A1) r.outcome = Outcome::A1;
    if (r.outcome == Outcome::NoAccident && h.kind == HazardKind::A2) r.outcome = Outcome::A2;
  }

  for (const auto & e : log.events) {
    if (e.signal == "fault" && e.value > 0.0) {
      r.fault_activation = e.t;
      break;
    }
  }
  const double since = r.fault_armed ? r.fault_activation : 0.0;
  for (const auto & e : log.events) {
    const auto trig = trigger_of(e);
    if (!trig) continue;
    auto & rec = r.triggers[static_cast<std::size_t>(*trig)];
    if (!rec.fired) {
      rec.fired = true;
      rec.first_trigger = e.t;
      if (r.outcome == Outcome::NoAccident) rec.trigger_to_end = r.end_time - e.t;
    }
    // Mitigation time counts from the fault onset to the first response to it.
    if (r.fault_armed && std::isnan(rec.mitigation_time) && e.t >= since) {
      rec.mitigation_time = e.t - since;
    }
  }

  const double friction = std::max(log.meta.friction, 1e-9);
  std::vector<double> tail_gaps;
  for (const auto & s : log.records) {
    if (std::isfinite(s.truth_rd) && s.truth_rs > 0.0) {
      r.min_ttc = std::min(r.min_ttc, std::max(0.0, s.truth_rd) / s.truth_rs);
      r.min_t_fcw = std::min(r.min_t_fcw, log.meta.aeb_t_react + s.speed / log.meta.a_driver);
    }
    r.hardest_brake = std::max(r.hardest_brake, std::min(1.0, -s.accel / (friction * kGravity)));
    r.min_lane_distance = std::min({r.min_lane_distance, s.lane_left, s.lane_right});
    const auto src = static_cast<CommandSource>(s.long_source);
    if (src == CommandSource::ADAS || src == CommandSource::ML) {
      r.sw_accel_min = std::min(r.sw_accel_min, s.accel);
      r.sw_accel_max = std::max(r.sw_accel_max, s.accel);
    }
    if (src == CommandSource::AEB && s.aeb_stage == 4) {
      r.brake100_decel = std::max(r.brake100_decel, -s.accel);
    }
    if (s.t >= r.end_time - 10.0) tail_gaps.push_back(s.truth_rd);
  }
  const auto finite = std::count_if(tail_gaps.begin(), tail_gaps.end(),
                                    [](double g) { return std::isfinite(g); });
  if (r.outcome == Outcome::NoAccident && finite * 2 >= static_cast<long>(tail_gaps.size()) &&
      finite > 0) {
    double sum = 0.0;
    for (double g : tail_gaps) {
      if (std::isfinite(g)) sum += g;
    }
    r.stable_following_distance = sum / static_cast<double>(finite);
  }
  return r;
}

}  // namespace adas_sim
