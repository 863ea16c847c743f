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

#ifndef ADAS_SIM__WORLD_HPP_
#define ADAS_SIM__WORLD_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "adas_sim/road.hpp"

namespace adas_sim
{

using VehicleId = int;
inline constexpr VehicleId kEgoId = 0;

struct VehicleState
{
  VehicleId id{kEgoId};
  double x{0.0};
  double y{0.0};
  double heading{0.0};
  double speed{0.0};
  double accel{0.0};
  double curvature{0.0};
  double length{4.9};
  double width{1.8};
};

/// Largest curvature the tyres can hold at this speed: the steering stop or the
/// lateral friction limit mu * g / v^2, whichever is tighter.
double curvature_limit(double speed, double friction);

/// One semi-implicit Euler step of the kinematic bicycle. Longitudinal accel is
/// clamped to [-mu * 9.8, +mu * 2.0], curvature to +/- curvature_limit, and
/// speed saturates at zero. Throws HarnessFault on non-finite input.
VehicleState step_vehicle(const VehicleState & state, double cmd_accel, double cmd_curvature,
                          double friction, double dt);

/// Scripted (non-ego) vehicles live in road coordinates.
struct TrafficVehicle
{
  VehicleState state;
  FrenetPoint frenet;
  int lane{0};
  // Lateral manoeuvre in progress: ramp d from start to target over [t0, t0 + duration].
  double lateral_from{0.0};
  double lateral_to{0.0};
  double lateral_t0{0.0};
  double lateral_duration{0.0};
  bool changing_lane{false};
};

struct WorldState
{
  double t{0.0};
  std::int64_t step_index{0};
  VehicleState ego;
  FrenetPoint ego_frenet;
  int ego_lane{0};
  std::vector<TrafficVehicle> traffic;
  const LaneGeometry * road{nullptr};
  std::uint64_t rng_seed{0};

  const TrafficVehicle * find(VehicleId id) const;
  TrafficVehicle * find(VehicleId id);
};

struct LaneOffset
{
  double center_offset{0.0};  // positive left of lane center
  double left{0.0};           // vehicle's left side to left lane line
  double right{0.0};          // vehicle's right side to right lane line
  double heading_error{0.0};  // vehicle heading minus lane heading
  bool out_of_lane{false};    // center beyond a lane line, or off the road's ends
};

/// Offsets are measured against the lane the vehicle is assigned to. Always
/// left + right + width == lane_width.
LaneOffset lateral_offset(const WorldState & world, VehicleId id);
LaneOffset lateral_offset(const LaneGeometry & road, const FrenetPoint & p, double heading,
                          double width, int lane);

}  // namespace adas_sim

#endif  // ADAS_SIM__WORLD_HPP_
