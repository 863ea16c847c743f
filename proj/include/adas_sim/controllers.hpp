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

#ifndef ADAS_SIM__CONTROLLERS_HPP_
#define ADAS_SIM__CONTROLLERS_HPP_

#include <optional>
#include <string>

#include "adas_sim/common.hpp"
#include "adas_sim/perception.hpp"
#include "adas_sim/world.hpp"

namespace adas_sim
{

enum class CommandSource { ADAS, Driver, AEB, ML, SafetyCheck };

std::string to_string(CommandSource source);

/// Actuation request from one source. A source that does not act on a channel
/// leaves it empty (AEB never steers, an emergency brake never steers).
struct ControlCommand
{
  std::optional<double> accel_request;      // m/s^2
  std::optional<double> curvature_request;  // 1/m
  CommandSource source{CommandSource::ADAS};
  double t{0.0};
};

struct AccParams
{
  double set_speed{mph_to_mps(50.0)};
  double time_headway{1.45};
  double standstill_gap{4.0};
  double gap_gain{0.15};        // 1/s^2 per m of gap error
  double speed_gain{0.6};       // 1/s per m/s of closing speed
  double cruise_gain{0.4};      // 1/s per m/s below set speed
  double max_accel{kMaxPropulsion};
  double max_decel{kGravity};

  double gap_target(double ego_speed) const { return time_headway * ego_speed + standstill_gap; }
  void validate() const;
};

/// Longitudinal planner surrogate: follow the detected lead at the headway gap,
/// never faster than set-speed tracking allows. Pure function of its inputs.
double acc_step(const PerceptionFrame & frame, const VehicleState & ego, const AccParams & params);

struct AlcParams
{
  double offset_gain{0.0015};  // 1/m per m of center offset
  double heading_gain{0.06};    // 1/m per rad of heading error
  double rate_limit{0.005};     // 1/m per step on the correction term
  void validate() const;
};

/// Lateral planner surrogate: desired curvature from perception plus a
/// rate-limited lane-centering correction.
class AlcController
{
public:
  explicit AlcController(AlcParams params = {}) : params_(params) {}

  double step(const PerceptionFrame & frame, const VehicleState & ego);
  double correction() const { return correction_; }
  void reset() { correction_ = 0.0; last_request_ = 0.0; }

private:
  AlcParams params_;
  double correction_{0.0};
  double last_request_{0.0};
};

}  // namespace adas_sim

#endif  // ADAS_SIM__CONTROLLERS_HPP_
