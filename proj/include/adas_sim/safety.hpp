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

#ifndef ADAS_SIM__SAFETY_HPP_
#define ADAS_SIM__SAFETY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adas_sim/controllers.hpp"
#include "adas_sim/perception.hpp"

namespace adas_sim
{

// ---------------------------------------------------------------------------
// Time to collision and the phase-controlled AEBS

/// RD / RS, or +infinity when not closing or when RD is the no-lead sentinel.
double compute_ttc(double rd, double rs);

struct AebsThresholds
{
  double t_fcw;
  double t_pb1;
  double t_pb2;
  double t_fb;
};

/// t_fcw = T_react + v / a_driver, then v / 3.8, v / 5.8, v / 9.8.
AebsThresholds aebs_thresholds(double v_ego, double a_driver, double t_react);

enum class AebStage { Inactive = 0, FcwAlert = 1, Brake90 = 2, Brake95 = 3, Brake100 = 4 };

std::string to_string(AebStage stage);
double brake_fraction(AebStage stage);

/// Table lookup: which interval of the thresholds contains this TTC. Each
/// threshold belongs to the less severe side (TTC must drop strictly below it).
AebStage stage_for_ttc(double ttc, const AebsThresholds & th);

enum class AebMode { Off, Compromised, Independent };

std::string to_string(AebMode mode);

struct AebsState
{
  AebStage stage{AebStage::Inactive};
  double a_driver{4.5};
  double t_react{2.5};
  AebMode input_source{AebMode::Compromised};
  bool enabled{true};      // false: FCW only, never brakes
  double friction{1.0};
  bool latched{false};     // a braking episode is in progress
  bool holding{false};     // brought the ego to a stop and holds it
};

struct AebsOutput
{
  AebsState state;
  std::optional<ControlCommand> command;
  bool fcw_alert{false};
  double ttc{kInfinity};
};

/// One AEBS cycle on whichever frame the caller routed to it. Once a brake
/// stage engages the episode latches: it may escalate but holds at least its
/// stage until the ego is stationary, then keeps it stationary.
AebsOutput aebs_step(const AebsState & state, const PerceptionFrame & frame, double v_ego);

// ---------------------------------------------------------------------------
// Firmware clamp

struct SafetyCheckParams
{
  double accel_max{2.0};
  double accel_min{-3.5};
  bool enabled{true};
};

/// Clamps the longitudinal request into [accel_min, accel_max]. The source tag
/// on the command is preserved.
ControlCommand safety_check(const ControlCommand & cmd, const SafetyCheckParams & params);

// ---------------------------------------------------------------------------
// Driver reaction simulator

enum class DriverAction { EmergencyBrake, SteerToCenter };

std::string to_string(DriverAction action);

struct DriverParams
{
  double t_react{2.5};
  double brake_decel{5.0};
  double brake_ramp{0.5};
  double steer_gain{0.04};           // 1/m per m of offset
  double steer_heading_gain{0.4};    // 1/m per rad of heading error
  double steer_release_offset{0.1};
  double lane_trigger{0.5};
  double ldw_distance{0.3};
  int ldw_steps{5};
  double overspeed_factor{1.1};
  double unexpected_accel{0.5};
  double unsafe_gap{4.9};            // one vehicle length
  double release_headway{2.0};

  void validate() const;
};

/// What the driver perceives this step. Distances come from the real world,
/// not from the (possibly attacked) perception network.
struct DriverObservation
{
  std::int64_t step{0};
  double t{0.0};
  bool fcw_alert{false};
  double v_ego{0.0};
  double ego_accel{0.0};
  double speed_limit{kInfinity};
  double rd{kInfinity};
  double rs{0.0};
  double gap_target{0.0};
  double lane_left{1.0};
  double lane_right{1.0};
  double center_offset{0.0};
  double heading_error{0.0};
  double road_curvature{0.0};
  double friction{1.0};
  bool cut_in{false};
};

struct PendingAction
{
  std::int64_t activation_step;
  DriverAction action;
  std::int64_t trigger_step;
};

struct DriverState
{
  std::vector<PendingAction> pending;
  std::optional<std::int64_t> brake_since;   // step the emergency brake started
  bool steering{false};
  int ldw_count{0};
};

struct DriverEvent
{
  std::int64_t step;
  DriverAction action;
  bool executed;  // false: trigger noticed, true: action starts
};

struct DriverOutput
{
  DriverState state;
  std::optional<ControlCommand> command;
  std::vector<DriverEvent> events;
};

/// Actions execute exactly round(t_react / dt) steps after the trigger.
DriverOutput driver_step(const DriverState & state, const DriverObservation & obs,
                         const DriverParams & params);

// ---------------------------------------------------------------------------
// Which layers are active, and priority arbitration

struct InterventionConfig
{
  std::string name{"none"};
  bool driver{false};
  bool safety_check{false};
  AebMode aeb{AebMode::Off};
  bool ml{false};
  double driver_t_react{2.5};

  /// Comma-separated list: driver, safety-check, aeb-comp, aeb-indep, ml.
  static InterventionConfig parse(const std::string & list);
  std::string describe() const;
  void validate() const;
};

struct ArbitratedCommand
{
  double accel{0.0};
  double curvature{0.0};
  CommandSource long_source{CommandSource::ADAS};
  CommandSource lat_source{CommandSource::ADAS};
  bool clamped{false};  // the firmware check altered the winning request
};

/// Longitudinal priority AEB > Driver > ML > ADAS, lateral Driver > ML > ADAS.
/// The firmware clamp touches only ADAS/ML longitudinal requests. Throws
/// HarnessFault if the ADAS command is missing a channel.
ArbitratedCommand arbitrate(const std::optional<ControlCommand> & aeb,
                            const std::optional<ControlCommand> & driver,
                            const std::optional<ControlCommand> & ml, const ControlCommand & adas,
                            const InterventionConfig & config,
                            const SafetyCheckParams & clamp = {});

}  // namespace adas_sim

#endif  // ADAS_SIM__SAFETY_HPP_
