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

#include "adas_sim/controllers.hpp"

#include <algorithm>
#include <cmath>

namespace adas_sim
{

std::string to_string(CommandSource source)
{
  switch (source) {
    case CommandSource::ADAS: return "ADAS";
    case CommandSource::Driver: return "Driver";
    case CommandSource::AEB: return "AEB";
    case CommandSource::ML: return "ML";
    case CommandSource::SafetyCheck: return "SafetyCheck";
  }
  return "ADAS";
}

void AccParams::validate() const
{
  if (!(time_headway > 0.0)) throw ConfigError("acc: time_headway must be positive");
  if (!(set_speed > 0.0)) throw ConfigError("acc: set_speed must be positive");
  if (!(standstill_gap >= 0.0)) throw ConfigError("acc: standstill_gap must be >= 0");
  if (!(gap_gain > 0.0) || !(speed_gain >= 0.0) || !(cruise_gain > 0.0)) {
    throw ConfigError("acc: gains must be positive");
  }
  if (!(max_accel > 0.0) || !(max_decel > 0.0)) throw ConfigError("acc: limits must be positive");
}

double acc_step(const PerceptionFrame & frame, const VehicleState & ego, const AccParams & params)
{
  const double cruise = params.cruise_gain * (params.set_speed - ego.speed);
  double accel = cruise;
  if (frame.lead_detected && std::isfinite(frame.reported_rd)) {
    const double gap_error = frame.reported_rd - params.gap_target(ego.speed);
    const double follow = params.gap_gain * gap_error - params.speed_gain * frame.reported_rs;
    accel = std::min(follow, cruise);
  }
  return std::clamp(accel, -params.max_decel, params.max_accel);
}

void AlcParams::validate() const
{
  if (!(offset_gain >= 0.0) || !(heading_gain >= 0.0)) throw ConfigError("alc: gains must be >= 0");
  if (!(rate_limit > 0.0)) throw ConfigError("alc: rate_limit must be positive");
}

double AlcController::step(const PerceptionFrame & frame, const VehicleState & /*ego*/)
{
  if (frame.out_of_lane) return last_request_;
  const double target =
    -params_.offset_gain * frame.center_offset() - params_.heading_gain * frame.lane_heading;
  correction_ += clamp_abs(target - correction_, params_.rate_limit);
  last_request_ = clamp_abs(frame.reported_curvature + correction_, kCurvatureMax);
  return last_request_;
}

}  // namespace adas_sim
