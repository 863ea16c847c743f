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

#include "adas_sim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace adas_sim
{

std::string to_string(ScenarioId id)
{
  return "S" + std::to_string(static_cast<int>(id) + 1);
}

ScenarioId scenario_id_from_string(const std::string & name)
{
  for (ScenarioId id : kAllScenarios) {
    if (to_string(id) == name) return id;
  }
  throw ConfigError("unknown scenario '" + name + "' (expected S1..S6)");
}

void ScenarioSpec::validate() const
{
  road.validate();
  if (!(ego_init_speed >= 0.0)) throw ConfigError("scenario " + id + ": ego_init_speed < 0");
  if (!(init_gap > 0.0)) throw ConfigError("scenario " + id + ": init_gap must be positive");
  if (!(friction > 0.0 && friction <= 1.0)) {
    throw ConfigError("scenario " + id + ": friction must lie in (0, 1]");
  }
  if (!(speed_limit > 0.0)) throw ConfigError("scenario " + id + ": speed_limit must be positive");
  if (!(trigger_jitter >= 0.0)) throw ConfigError("scenario " + id + ": trigger_jitter < 0");

  std::set<VehicleId> ids;
  for (const auto & t : traffic) {
    if (t.id == kEgoId) throw ConfigError("scenario " + id + ": vehicle id 0 is the ego");
    if (!ids.insert(t.id).second) {
      throw ConfigError("scenario " + id + ": duplicate vehicle id " + std::to_string(t.id));
    }
    if (t.lane < 0 || t.lane >= road.lane_count()) {
      throw ConfigError("scenario " + id + ": vehicle " + std::to_string(t.id) +
                        " placed in nonexistent lane");
    }
    if (!(t.speed >= 0.0) || !(t.length > 0.0) || !(t.width > 0.0)) {
      throw ConfigError("scenario " + id + ": vehicle " + std::to_string(t.id) +
                        " has non-physical speed or size");
    }
    if (!(init_gap + t.gap_offset > 0.0)) {
      throw ConfigError("scenario " + id + ": vehicle " + std::to_string(t.id) +
                        " would start overlapping the ego");
    }
  }
  for (const auto & e : lead_profile) {
    if (!ids.count(e.vehicle)) {
      throw ConfigError("scenario " + id + ": lead_profile references nonexistent vehicle " +
                        std::to_string(e.vehicle));
    }
    if (e.trigger_time.has_value() == e.trigger_gap.has_value()) {
      throw ConfigError("scenario " + id + ": each lead_profile entry needs exactly one of "
                        "trigger_time or trigger_gap");
    }
    if (!(e.accel > 0.0) || !(e.target_speed >= 0.0)) {
      throw ConfigError("scenario " + id + ": lead_profile accel must be > 0, target >= 0");
    }
  }
  for (const auto & e : lane_changes) {
    if (!ids.count(e.vehicle)) {
      throw ConfigError("scenario " + id + ": lane change references nonexistent vehicle " +
                        std::to_string(e.vehicle));
    }
    if (e.target_lane < 0 || e.target_lane >= road.lane_count()) {
      throw ConfigError("scenario " + id + ": lane change into nonexistent lane");
    }
    if (!(e.duration > 0.0)) throw ConfigError("scenario " + id + ": lane change duration <= 0");
  }
}

ScenarioSpec builtin_scenario(ScenarioId id, double init_gap, double friction)
{
  const double v30 = mph_to_mps(30.0);
  const double v40 = mph_to_mps(40.0);

  ScenarioSpec spec;
  spec.id = to_string(id);
  spec.init_gap = init_gap;
  spec.friction = friction;

  TrafficSpec lead;
  lead.id = 1;
  lead.speed = v30;

  switch (id) {
    case ScenarioId::S1:
      spec.traffic = {lead};
      break;
    case ScenarioId::S2:
      spec.traffic = {lead};
      spec.lead_profile = {{1, 40.0, std::nullopt, v40, 1.0}};
      break;
    case ScenarioId::S3:
      lead.speed = v40;
      spec.traffic = {lead};
      spec.lead_profile = {{1, 40.0, std::nullopt, v30, 1.5}};
      break;
    case ScenarioId::S4:
      spec.traffic = {lead};
      spec.lead_profile = {{1, 20.0, std::nullopt, 0.0, 6.0}};
      break;
    case ScenarioId::S5: {
      TrafficSpec side;
      side.id = 2;
      side.lane = 1;
      side.gap_offset = -(12.0 + side.length);
      side.speed = v30;
      spec.traffic = {lead, side};
      spec.lane_changes = {{2, 40.0, 0, 3.0}};
      break;
    }
    case ScenarioId::S6: {
      TrafficSpec far;
      far.id = 2;
      far.gap_offset = 40.0 + lead.length;
      far.speed = v30;
      spec.traffic = {lead, far};
      spec.lane_changes = {{1, 40.0, 1, 3.0}};
      break;
    }
  }
  spec.validate();
  return spec;
}

WorldState initial_world(const ScenarioSpec & spec, std::uint64_t seed)
{
  WorldState w;
  w.road = &spec.road;
  w.rng_seed = seed;
  w.ego.id = kEgoId;
  w.ego.length = spec.ego_length;
  w.ego.width = spec.ego_width;
  w.ego.speed = spec.ego_init_speed;
  const Pose2d p = spec.road.pose_at({0.0, 0.0});
  w.ego.x = p.x;
  w.ego.y = p.y;
  w.ego.heading = p.heading;
  w.ego_frenet = {0.0, 0.0};
  w.ego_lane = 0;

  for (const auto & t : spec.traffic) {
    TrafficVehicle v;
    v.state.id = t.id;
    v.state.length = t.length;
    v.state.width = t.width;
    v.state.speed = t.speed;
    v.lane = t.lane;
    const double gap = spec.init_gap + t.gap_offset;
    v.frenet = {0.5 * spec.ego_length + gap + 0.5 * t.length, t.lane * spec.road.lane_width()};
    const Pose2d q = spec.road.pose_at(v.frenet);
    v.state.x = q.x;
    v.state.y = q.y;
    v.state.heading = q.heading;
    v.lateral_from = v.lateral_to = v.frenet.d;
    w.traffic.push_back(v);
  }
  return w;
}

double bumper_gap(const WorldState & world, const TrafficVehicle & other)
{
  return (other.frenet.s - 0.5 * other.state.length) -
         (world.ego_frenet.s + 0.5 * world.ego.length);
}

TrafficScript::TrafficScript(const ScenarioSpec & spec, double time_shift)
: spec_(&spec),
  time_shift_(time_shift),
  speed_fired_(spec.lead_profile.size(), false),
  lane_fired_(spec.lane_changes.size(), false)
{
  for (const auto & t : spec.traffic) tracks_.push_back({t.id, t.speed, 1.0});
}

double TrafficScript::target_speed(VehicleId id) const
{
  for (const auto & tr : tracks_) {
    if (tr.id == id) return tr.target;
  }
  return 0.0;
}

std::vector<TrafficCommand> TrafficScript::update(const WorldState & world)
{
  for (std::size_t i = 0; i < spec_->lead_profile.size(); ++i) {
    if (speed_fired_[i]) continue;
    const SpeedEvent & e = spec_->lead_profile[i];
    bool fire = false;
    if (e.trigger_time) {
      fire = world.t >= *e.trigger_time + time_shift_;
    } else if (const TrafficVehicle * v = world.find(e.vehicle)) {
      fire = bumper_gap(world, *v) <= *e.trigger_gap;
    }
    if (!fire) continue;
    speed_fired_[i] = true;
    for (auto & tr : tracks_) {
      if (tr.id == e.vehicle) {
        tr.target = e.target_speed;
        tr.accel_cap = e.accel;
      }
    }
  }

  std::vector<TrafficCommand> out;
  out.reserve(tracks_.size());
  for (const auto & tr : tracks_) {
    const TrafficVehicle * v = world.find(tr.id);
    const double speed = v ? v->state.speed : 0.0;
    out.push_back({tr.id, clamp_abs(kSpeedGain * (tr.target - speed), tr.accel_cap), {}});
  }
  for (std::size_t i = 0; i < spec_->lane_changes.size(); ++i) {
    if (lane_fired_[i]) continue;
    const LaneChangeEvent & e = spec_->lane_changes[i];
    if (world.t < e.trigger_time + time_shift_) continue;
    lane_fired_[i] = true;
    for (auto & cmd : out) {
      if (cmd.id == e.vehicle) cmd.lane_change = e;
    }
  }
  return out;
}

void step_traffic(WorldState & world, const std::vector<TrafficCommand> & commands,
                  double friction, double dt)
{
  const LaneGeometry & road = *world.road;
  for (const auto & cmd : commands) {
    TrafficVehicle * v = world.find(cmd.id);
    if (v == nullptr) continue;
    if (cmd.lane_change) {
      v->lateral_from = v->frenet.d;
      v->lateral_to = cmd.lane_change->target_lane * road.lane_width();
      v->lateral_t0 = world.t;
      v->lateral_duration = cmd.lane_change->duration;
      v->changing_lane = true;
    }
    const double accel = std::clamp(cmd.accel, -friction * kGravity, friction * kMaxPropulsion);
    double speed = std::max(0.0, v->state.speed + accel * dt);
    // Within 5 mm/s of the target: snap onto it instead of an endless exponential tail.
    if (std::abs(accel) < TrafficScript::kSpeedGain * 0.005) {
      speed = std::max(0.0, v->state.speed + accel / TrafficScript::kSpeedGain);
    }
    v->state.accel = (speed - v->state.speed) / dt;
    v->state.speed = speed;
    v->frenet.s += speed * dt;

    double d_rate = 0.0;
    if (v->changing_lane) {
      const double tau = (world.t + dt - v->lateral_t0) / v->lateral_duration;
      if (tau >= 1.0) {
        v->frenet.d = v->lateral_to;
        v->changing_lane = false;
        v->lane = static_cast<int>(std::lround(v->lateral_to / road.lane_width()));
      } else {
        const double blend = 0.5 * (1.0 - std::cos(std::numbers::pi * tau));
        v->frenet.d = v->lateral_from + (v->lateral_to - v->lateral_from) * blend;
        d_rate = (v->lateral_to - v->lateral_from) * 0.5 * std::numbers::pi *
                 std::sin(std::numbers::pi * tau) / v->lateral_duration;
      }
    }
    const Pose2d q = road.pose_at(v->frenet);
    v->state.x = q.x;
    v->state.y = q.y;
    v->state.heading = q.heading + (speed > 0.1 ? std::atan2(d_rate, speed) : 0.0);
    v->state.curvature = road.curvature_at(v->frenet.s);
  }
}

void refresh_ego_frenet(WorldState & world)
{
  world.ego_frenet = world.road->project(world.ego.x, world.ego.y);
}

}  // namespace adas_sim
