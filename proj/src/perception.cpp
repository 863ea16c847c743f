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

#include "adas_sim/perception.hpp"

#include <cmath>

#include "adas_sim/scenario.hpp"

namespace adas_sim
{

const TrafficVehicle * find_lead(const WorldState & world, double max_range)
{
  const double lane_center = world.ego_lane * world.road->lane_width();
  const double half_lane = 0.5 * world.road->lane_width();
  const TrafficVehicle * best = nullptr;
  double best_gap = max_range;
  for (const auto & v : world.traffic) {
    if (std::abs(v.frenet.d - lane_center) >= half_lane) continue;
    if (v.frenet.s <= world.ego_frenet.s) continue;
    const double gap = bumper_gap(world, v);
    if (gap < best_gap || (best == nullptr && gap <= max_range)) {
      best = &v;
      best_gap = gap;
    }
  }
  return best;
}

PerceptionFrame sense_ground_truth(const WorldState & world, const SensorParams & params)
{
  PerceptionFrame f;
  f.t = world.t;
  const LaneOffset lane = lateral_offset(world, kEgoId);
  f.lane_left = lane.left;
  f.lane_right = lane.right;
  f.lane_heading = lane.heading_error;
  f.out_of_lane = lane.out_of_lane;
  f.reported_curvature =
    world.road->curvature_at(world.ego_frenet.s + params.curvature_lookahead);

  if (const TrafficVehicle * lead = find_lead(world, params.max_range)) {
    const double gap = bumper_gap(world, *lead);
    f.lead_id = lead->state.id;
    if (gap >= params.detection_floor) {
      f.lead_detected = true;
      f.reported_rd = gap;
      f.reported_rs = world.ego.speed - lead->state.speed;
    }
  }
  return f;
}

PerceptionFrame independent_sense(const WorldState & world, const SensorParams & params)
{
  return sense_ground_truth(world, params);
}

std::string to_string(FaultKind kind)
{
  switch (kind) {
    case FaultKind::None: return "none";
    case FaultKind::RelativeDistance: return "rd";
    case FaultKind::DesiredCurvature: return "curvature";
    case FaultKind::Mixed: return "mixed";
  }
  return "none";
}

FaultKind fault_kind_from_string(const std::string & name)
{
  if (name == "none" || name == "fault-free") return FaultKind::None;
  if (name == "rd" || name == "relative-distance" || name == "RelativeDistance") {
    return FaultKind::RelativeDistance;
  }
  if (name == "curvature" || name == "desired-curvature" || name == "DesiredCurvature") {
    return FaultKind::DesiredCurvature;
  }
  if (name == "mixed" || name == "Mixed") return FaultKind::Mixed;
  throw ConfigError("unknown fault kind '" + name + "' (expected none, rd, curvature, mixed)");
}

void FaultSpec::validate() const
{
  if (targets_rd()) {
    if (rd_schedule.empty()) throw ConfigError("fault: rd_schedule is empty");
    for (std::size_t i = 1; i < rd_schedule.size(); ++i) {
      if (!(rd_schedule[i].below > rd_schedule[i - 1].below)) {
        throw ConfigError("fault: rd_schedule thresholds must be strictly increasing");
      }
    }
  }
  if (!std::isfinite(curvature_bias)) throw ConfigError("fault: curvature_bias not finite");
  if (!(patch_length > 0.0)) throw ConfigError("fault: patch_length must be positive");
  if (duration_steps && *duration_steps <= 0) {
    throw ConfigError("fault: duration_steps must be positive");
  }
}

std::optional<double> rd_fault_value(const FaultSpec & spec, double true_rd)
{
  for (const auto & th : spec.rd_schedule) {
    if (true_rd < th.below) return th.value;
  }
  return std::nullopt;
}

double biased_curvature(const FaultSpec & spec, double true_curvature)
{
  return true_curvature + clamp_abs(spec.curvature_bias, kCurvatureMax);
}

FaultInjector::FaultInjector(FaultSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

bool FaultInjector::within_duration(double t) const
{
  if (!spec_.duration_steps || !first_activation_) return true;
  return t < *first_activation_ + static_cast<double>(*spec_.duration_steps) * kDt - 1e-9;
}

PerceptionFrame FaultInjector::apply(const PerceptionFrame & frame, double ego_s, double dt)
{
  PerceptionFrame out = frame;
  rd_active_ = false;
  curvature_active_ = false;
  if (spec_.kind == FaultKind::None) return out;

  if (spec_.targets_rd() && frame.lead_detected && within_duration(frame.t)) {
    if (const auto v = rd_fault_value(spec_, frame.reported_rd)) {
      rd_active_ = true;
      out.reported_rd = spec_.rd_mode == RdFaultMode::Additive ? frame.reported_rd + *v : *v;
    }
  }
  if (spec_.targets_rd()) {
    // The tracker downstream of the network only sees the spoofed range, so
    // while spoofing (and on the frame after) RS comes from differencing it.
    if (out.lead_detected && prev_reported_rd_ && (rd_active_ || prev_spoofed_)) {
      out.reported_rs = (*prev_reported_rd_ - out.reported_rd) / dt;
    }
    prev_reported_rd_ = out.lead_detected ? std::optional<double>(out.reported_rd) : std::nullopt;
    prev_spoofed_ = rd_active_;
  }

  if (spec_.targets_curvature() && within_duration(frame.t) && ego_s >= spec_.patch_start &&
      ego_s < spec_.patch_start + spec_.patch_length) {
    curvature_active_ = true;
    out.reported_curvature = biased_curvature(spec_, frame.reported_curvature);
  }
  if (active() && !first_activation_) first_activation_ = frame.t;
  return out;
}

}  // namespace adas_sim
