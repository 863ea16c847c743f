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

#ifndef ADAS_SIM__HAZARD_HPP_
#define ADAS_SIM__HAZARD_HPP_

#include <array>
#include <cstdint>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "adas_sim/common.hpp"
#include "adas_sim/world.hpp"

namespace adas_sim
{

enum class HazardKind { H1, H2, A1, A2 };

std::string to_string(HazardKind kind);

struct HazardEvent
{
  std::int64_t step{0};
  double t{0.0};
  HazardKind kind{HazardKind::H1};
  std::string detail;
  double truth_rd{kInfinity};
  double lane_offset{0.0};
};

struct HazardParams
{
  double headway{2.0};        // s, H1 when true RD < v * headway
  double line_margin{0.1};    // m, H2 when a lane-line distance <= margin
  double front_contact{1.0};  // m of longitudinal penetration still counted as rear-end
};

/// Nearest vehicle ahead whose footprint overlaps the ego's laterally, as a
/// true bumper gap. +infinity when none.
double truth_forward_gap(const WorldState & world, VehicleId * who = nullptr);

/// Every hazard condition that holds in this world (ground truth only).
std::vector<HazardEvent> detect_hazards(const WorldState & world, const HazardParams & params);

/// Edge-triggered wrapper: H1/H2 are reported when a condition starts, A1/A2
/// on first occurrence, after which the run must stop.
class HazardMonitor
{
public:
  explicit HazardMonitor(HazardParams params = {}) : params_(params) {}

  std::vector<HazardEvent> step(const WorldState & world);
  bool accident() const { return accident_; }

private:
  HazardParams params_;
  bool h1_{false};
  bool h2_{false};
  bool accident_{false};
};

// ---------------------------------------------------------------------------
// Run log

/// One row of the per-run time series.
struct StepRecord
{
  std::int64_t step{0};
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double s{0.0};
  double d{0.0};
  double speed{0.0};
  double accel{0.0};          // executed (arbitrated) request
  double curvature{0.0};
  int long_source{0};         // CommandSource
  int lat_source{0};
  double truth_rd{kInfinity};
  double truth_rs{0.0};
  double reported_rd{kInfinity};
  double reported_rs{0.0};
  double reported_curvature{0.0};
  int indep_lead{0};
  double indep_rd{kInfinity};
  double indep_rs{0.0};
  double indep_curvature{0.0};
  double lane_left{0.0};
  double lane_right{0.0};
  double heading_error{0.0};
  double adas_accel{0.0};
  double adas_curvature{0.0};
  double ml_accel{std::numeric_limits<double>::quiet_NaN()};
  double ml_curvature{std::numeric_limits<double>::quiet_NaN()};
  double cusum_long{0.0};
  double cusum_lat{0.0};
  int recovery{0};            // bit 0 longitudinal, bit 1 lateral
  int aeb_stage{0};
  int fcw{0};
  int driver_brake{0};
  int driver_steer{0};
  int fault{0};               // bit 0 RD, bit 1 curvature
  int clamped{0};
};

/// Discrete event row: step, t, signal, source, value.
struct LogEvent
{
  std::int64_t step{0};
  double t{0.0};
  std::string signal;
  std::string source;
  double value{0.0};
};

enum class Outcome { NoAccident, A1, A2, Invalid };

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string & name);

/// Layers whose first trigger is tracked per run.
enum class Trigger { Aeb, DriverBrake, DriverSteer, Ml, SafetyCheck };
inline constexpr std::size_t kTriggerCount = 5;
std::string to_string(Trigger trigger);

struct TriggerRecord
{
  bool fired{false};
  double first_trigger{std::numeric_limits<double>::quiet_NaN()};
  double mitigation_time{std::numeric_limits<double>::quiet_NaN()};  // fault -> trigger
  double trigger_to_end{std::numeric_limits<double>::quiet_NaN()};   // trigger -> safe end
};

struct RunMeta
{
  std::size_t index{0};
  std::string scenario{"S1"};
  std::string fault{"none"};
  double init_gap{60.0};
  double friction{1.0};
  std::string interventions{"none"};
  double t_react{2.5};      // driver
  double aeb_t_react{2.5};  // the AEBS's assumed driver, for min t_fcw
  int rep{0};
  std::uint64_t seed{0};
  bool safety_check{false};
  double a_driver{4.5};
};

struct RunLog
{
  RunMeta meta;
  std::vector<StepRecord> records;
  std::vector<LogEvent> events;
  std::vector<HazardEvent> hazards;
  std::string invalid_reason;  // non-empty: the run aborted
};

struct RunResult
{
  RunMeta meta;
  Outcome outcome{Outcome::NoAccident};
  std::vector<HazardEvent> hazards;
  std::int64_t steps{0};
  double end_time{0.0};
  bool fault_armed{false};
  double fault_activation{std::numeric_limits<double>::quiet_NaN()};
  double min_ttc{kInfinity};
  double min_t_fcw{kInfinity};
  double hardest_brake{0.0};
  double stable_following_distance{std::numeric_limits<double>::quiet_NaN()};
  double min_lane_distance{kInfinity};
  int h1_count{0};
  int h2_count{0};
  std::array<TriggerRecord, kTriggerCount> triggers{};
  // Extremes of executed ADAS/ML-sourced longitudinal requests.
  double sw_accel_min{kInfinity};
  double sw_accel_max{-kInfinity};
  // Deepest executed AEB request while at Brake100 (positive decel), 0 if none.
  double brake100_decel{0.0};
  std::string invalid_reason;

  bool prevented() const { return fault_armed && outcome == Outcome::NoAccident; }
  const TriggerRecord & trigger(Trigger t) const { return triggers[static_cast<std::size_t>(t)]; }
};

/// Derives every RunResult field from the log. A layer has fired if it
/// triggered at any point of the run; its mitigation time uses the first
/// trigger at or after the fault activation. Throws HarnessFault on an empty,
/// valid log.
RunResult finalize_metrics(const RunLog & log);

}  // namespace adas_sim

#endif  // ADAS_SIM__HAZARD_HPP_
