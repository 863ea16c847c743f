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

#ifndef ADAS_SIM__PERCEPTION_HPP_
#define ADAS_SIM__PERCEPTION_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "adas_sim/common.hpp"
#include "adas_sim/world.hpp"

namespace adas_sim
{

/// Surrogate of the perception network output that the controllers consume.
struct PerceptionFrame
{
  double t{0.0};
  double reported_rd{kInfinity};    // m, bumper to bumper
  double reported_rs{0.0};          // m/s, positive when closing
  double reported_curvature{0.0};   // 1/m, desired path curvature
  double lane_left{0.0};            // m, vehicle side to lane line
  double lane_right{0.0};
  double lane_heading{0.0};         // rad, heading relative to the lane
  bool lead_detected{false};
  bool out_of_lane{false};
  VehicleId lead_id{-1};            // ground-truth identity, -1 when none

  double center_offset() const { return 0.5 * (lane_right - lane_left); }
};

struct SensorParams
{
  double detection_floor{2.0};  // leads closer than this are invisible to the camera
  double max_range{250.0};
  double curvature_lookahead{0.0};
};

/// Nearest vehicle ahead whose center lies inside the ego's lane, or nullptr.
const TrafficVehicle * find_lead(const WorldState & world, double max_range);

/// Fault-free frame built from the world.
PerceptionFrame sense_ground_truth(const WorldState & world, const SensorParams & params = {});

/// Redundant, uncompromised channel. Same content as sense_ground_truth; it
/// exists as its own entry point so it is never routed through a FaultInjector.
PerceptionFrame independent_sense(const WorldState & world, const SensorParams & params = {});

enum class FaultKind { None, RelativeDistance, DesiredCurvature, Mixed };

std::string to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string & name);

enum class RdFaultMode { Additive, Substitute };

struct RdThreshold
{
  double below;   // applies while true RD < below
  double value;   // offset (Additive) or reading (Substitute)
};

struct FaultSpec
{
  FaultKind kind{FaultKind::None};
  RdFaultMode rd_mode{RdFaultMode::Additive};
  // Strictly increasing thresholds; the tightest satisfied one wins.
  std::vector<RdThreshold> rd_schedule{{20.0, 38.0}, {25.0, 15.0}, {80.0, 10.0}};
  double curvature_bias{0.003};
  double patch_start{100.0};   // arc length of the road patch
  double patch_length{200.0};
  std::optional<long> duration_steps;  // unset: unlimited once armed

  bool targets_rd() const { return kind == FaultKind::RelativeDistance || kind == FaultKind::Mixed; }
  bool targets_curvature() const
  {
    return kind == FaultKind::DesiredCurvature || kind == FaultKind::Mixed;
  }
  void validate() const;
};

/// Offset (or substituted reading) for a true distance, nullopt when no
/// threshold is satisfied.
std::optional<double> rd_fault_value(const FaultSpec & spec, double true_rd);

/// Reported curvature under an active curvature fault, capped so the implied
/// steering change stays within the 10 degree bound.
double biased_curvature(const FaultSpec & spec, double true_curvature);

/// Applies a FaultSpec to successive frames. Carries the previous spoofed
/// distance so reported RS can be re-derived by differencing.
class FaultInjector
{
public:
  explicit FaultInjector(FaultSpec spec);

  PerceptionFrame apply(const PerceptionFrame & frame, double ego_s, double dt = kDt);

  bool active() const { return rd_active_ || curvature_active_; }
  bool rd_active() const { return rd_active_; }
  bool curvature_active() const { return curvature_active_; }
  std::optional<double> first_activation() const { return first_activation_; }
  const FaultSpec & spec() const { return spec_; }

private:
  bool within_duration(double t) const;

  FaultSpec spec_;
  std::optional<double> prev_reported_rd_;
  std::optional<double> first_activation_;
  bool prev_spoofed_{false};
  bool rd_active_{false};
  bool curvature_active_{false};
};

}  // namespace adas_sim

#endif  // ADAS_SIM__PERCEPTION_HPP_
