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

#include "adas_sim/world.hpp"

#include <algorithm>
#include <cmath>

#include "adas_sim/common.hpp"

namespace adas_sim
{

double curvature_limit(double speed, double friction)
{
  const double v2 = speed * speed;
  if (v2 <= 0.0) return kCurvatureMax;
  return std::min(kCurvatureMax, friction * kGravity / v2);
}

VehicleState step_vehicle(const VehicleState & state, double cmd_accel, double cmd_curvature,
                          double friction, double dt)
{
  if (!std::isfinite(cmd_accel) || !std::isfinite(cmd_curvature) || !std::isfinite(friction) ||
      !std::isfinite(dt) || !std::isfinite(state.speed) || !std::isfinite(state.heading) ||
      !std::isfinite(state.x) || !std::isfinite(state.y)) {
    throw HarnessFault("step_vehicle: non-finite input for vehicle " + std::to_string(state.id));
  }
  VehicleState next = state;
  const double accel = std::clamp(cmd_accel, -friction * kGravity, friction * kMaxPropulsion);
  next.speed = std::max(0.0, state.speed + accel * dt);
  next.accel = (next.speed - state.speed) / dt;
  next.curvature = clamp_abs(cmd_curvature, curvature_limit(next.speed, friction));
  next.heading = state.heading + next.speed * next.curvature * dt;
  next.x = state.x + next.speed * std::cos(next.heading) * dt;
  next.y = state.y + next.speed * std::sin(next.heading) * dt;
  return next;
}

const TrafficVehicle * WorldState::find(VehicleId id) const
{
  for (const auto & v : traffic) {
    if (v.state.id == id) return &v;
  }
  return nullptr;
}

TrafficVehicle * WorldState::find(VehicleId id)
{
  for (auto & v : traffic) {
    if (v.state.id == id) return &v;
  }
  return nullptr;
}

LaneOffset lateral_offset(const LaneGeometry & road, const FrenetPoint & p, double heading,
                          double width, int lane)
{
  const double half_lane = 0.5 * road.lane_width();
  LaneOffset out;
  out.center_offset = p.d - lane * road.lane_width();
  out.left = half_lane - out.center_offset - 0.5 * width;
  out.right = half_lane + out.center_offset - 0.5 * width;
  out.heading_error = wrap_angle(heading - road.heading_at(p.s));
  out.out_of_lane =
    std::abs(out.center_offset) > half_lane || p.s < 0.0 || p.s > road.length();
  return out;
}

LaneOffset lateral_offset(const WorldState & world, VehicleId id)
{
  if (id == kEgoId) {
    return lateral_offset(*world.road, world.ego_frenet, world.ego.heading, world.ego.width,
                          world.ego_lane);
  }
  const TrafficVehicle * v = world.find(id);
  if (v == nullptr) throw HarnessFault("lateral_offset: unknown vehicle " + std::to_string(id));
  return lateral_offset(*world.road, v->frenet, v->state.heading, v->state.width, v->lane);
}

}  // namespace adas_sim
