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

#ifndef ADAS_SIM__SCENARIO_HPP_
#define ADAS_SIM__SCENARIO_HPP_

#include <optional>
#include <string>
#include <vector>

#include "adas_sim/common.hpp"
#include "adas_sim/road.hpp"
#include "adas_sim/world.hpp"

namespace adas_sim
{

enum class ScenarioId { S1, S2, S3, S4, S5, S6 };

std::string to_string(ScenarioId id);
ScenarioId scenario_id_from_string(const std::string & name);
inline constexpr ScenarioId kAllScenarios[] = {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                                               ScenarioId::S4, ScenarioId::S5, ScenarioId::S6};

/// Non-ego vehicle placement. The initial bumper gap to the ego is
/// init_gap + gap_offset.
struct TrafficSpec
{
  VehicleId id{1};
  int lane{0};
  double gap_offset{0.0};
  double speed{mph_to_mps(30.0)};
  double length{4.9};
  double width{1.8};
};

/// Speed change of one scripted vehicle. Fires at trigger_time (plus the run's
/// jitter) or once the ego closes to within trigger_gap, whichever is set.
struct SpeedEvent
{
  VehicleId vehicle{1};
  std::optional<double> trigger_time;
  std::optional<double> trigger_gap;
  double target_speed{0.0};
  double accel{1.0};
};

struct LaneChangeEvent
{
  VehicleId vehicle{1};
  double trigger_time{40.0};
  int target_lane{0};
  double duration{3.0};
};

struct ScenarioSpec
{
  std::string id{"S1"};
  double ego_init_speed{mph_to_mps(50.0)};
  double init_gap{60.0};
  double friction{1.0};
  double speed_limit{mph_to_mps(50.0)};
  double ego_length{4.9};
  double ego_width{1.8};
  LaneGeometry road{LaneGeometry::highway()};
  std::vector<TrafficSpec> traffic;
  std::vector<SpeedEvent> lead_profile;
  std::vector<LaneChangeEvent> lane_changes;
  // Half-width of the uniform per-run shift applied to every time trigger.
  double trigger_jitter{5.0};

  /// Throws ConfigError for unknown vehicle references, bad lanes, or
  /// non-physical values.
  void validate() const;
};

/// The six built-in driving scenarios on the default highway.
ScenarioSpec builtin_scenario(ScenarioId id, double init_gap = 60.0, double friction = 1.0);

/// Builds the t = 0 world: ego centered in lane 0 at s = 0, traffic placed by gap.
WorldState initial_world(const ScenarioSpec & spec, std::uint64_t seed);

/// Bumper-to-bumper distance along the road, ego front to the other's rear.
double bumper_gap(const WorldState & world, const TrafficVehicle & other);

struct TrafficCommand
{
  VehicleId id{1};
  double accel{0.0};
  std::optional<LaneChangeEvent> lane_change;
};

/// Stateful executor of a scenario's scripted events. Scripted vehicles track
/// their target speed with a proportional law capped at the event's accel magnitude.
class TrafficScript
{
public:
  static constexpr double kSpeedGain = 4.0;

  TrafficScript(const ScenarioSpec & spec, double time_shift);

  /// Commanded accelerations for every scripted vehicle at world.t.
  std::vector<TrafficCommand> update(const WorldState & world);

  double target_speed(VehicleId id) const;

private:
  struct Track
  {
    VehicleId id;
    double target;
    double accel_cap;
  };

  const ScenarioSpec * spec_;
  double time_shift_;
  std::vector<bool> speed_fired_;
  std::vector<bool> lane_fired_;
  std::vector<Track> tracks_;
};

/// Advances scripted vehicles one step in road coordinates.
void step_traffic(WorldState & world, const std::vector<TrafficCommand> & commands,
                  double friction, double dt);

/// Recomputes the ego's road coordinates after a Cartesian step.
void refresh_ego_frenet(WorldState & world);

}  // namespace adas_sim

#endif  // ADAS_SIM__SCENARIO_HPP_
