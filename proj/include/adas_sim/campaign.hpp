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

#ifndef ADAS_SIM__CAMPAIGN_HPP_
#define ADAS_SIM__CAMPAIGN_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adas_sim/simulation.hpp"

namespace adas_sim
{

/// Which table a run feeds.
enum class RunGroup { FaultFree, Matrix, ReactionSweep, FrictionSweep };

std::string to_string(RunGroup group);
RunGroup run_group_from_string(const std::string & name);

struct CampaignConfig
{
  std::vector<FaultKind> faults{FaultKind::RelativeDistance, FaultKind::DesiredCurvature,
                                FaultKind::Mixed};
  std::vector<double> init_gaps{60.0, 230.0};
  std::vector<ScenarioId> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
  int repetitions{10};
  std::uint64_t base_seed{20240601};

  // Fault-free baseline, ADAS only.
  bool fault_free{true};
  // Fault-free runs whose time series are written for predictor training.
  int timeseries_reps{2};

  std::vector<InterventionConfig> rows;
  std::vector<double> t_react_sweep;
  InterventionConfig t_react_row;
  std::vector<double> friction_sweep;
  InterventionConfig friction_row;

  // Templates copied into every run.
  FaultSpec fault;
  double patch_jitter{150.0};
  AccParams acc;
  AlcParams alc;
  SensorParams sensors;
  DriverParams driver;
  double a_driver{4.5};
  double aeb_t_react{2.5};
  HazardParams hazards;

  // Predictor: loaded from model_path, or trained on the fault-free time
  // series when empty.
  std::string model_path;
  std::optional<OutputVector> ml_b0;
  std::optional<OutputVector> ml_tau;
  TrainOptions train;

  // Worker cap; 0 means hardware concurrency. SIM_THREADS lowers it further.
  int threads{0};

  /// The paper's grid: eight intervention rows, T_react 1.0..3.5 s and
  /// mu in {1, 0.75, 0.5, 0.25}.
  static CampaignConfig paper_default();

  /// Throws ConfigError on empty dimensions or invalid templates.
  void validate() const;
  bool uses_ml() const;
};

struct CampaignRun
{
  RunGroup group{RunGroup::Matrix};
  std::string row;
  double sweep_value{std::numeric_limits<double>::quiet_NaN()};
  bool write_timeseries{false};
  RunSpec spec;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string & text);

/// base_seed + FNV-1a of (fault, gap, scenario, rep). Rows and sweep points
/// share seeds, so comparisons between them are paired.
std::uint64_t run_seed(std::uint64_t base_seed, FaultKind fault, double init_gap,
                       const std::string & scenario, int rep);

/// Deterministic enumeration: fault-free block, matrix rows, reaction-time
/// sweep, friction sweep. Indices are consecutive from 0.
std::vector<CampaignRun> expand_grid(const CampaignConfig & config);

/// Worker count after applying SIM_THREADS and the config cap.
int worker_count(int configured);

/// Runs every spec on a pool of workers. Results are ordered by spec index.
/// sink, when set, receives each finished log (from worker threads,
/// serialized by the caller's lock).
std::vector<RunResult> run_campaign(
  const std::vector<CampaignRun> & runs, int threads,
  const std::function<void(const CampaignRun &, const RunLog &)> & sink = {});

struct RowSummary
{
  RunGroup group{RunGroup::Matrix};
  std::string row;
  std::string fault;  // fault kind, or "all"
  double sweep_value{std::numeric_limits<double>::quiet_NaN()};
  int runs{0};
  int invalid{0};
  int valid{0};
  int a1{0};
  int a2{0};
  int prevented{0};
  double a1_rate{0.0};         // percent of valid runs
  double a2_rate{0.0};
  double prevented_rate{0.0};
  // Per Trigger: mean fault -> trigger time over runs where it responded to
  // the fault (NaN if none) and the percentage of valid runs where it fired.
  std::array<double, kTriggerCount> mitigation_time{};
  std::array<double, kTriggerCount> trigger_rate{};

  bool operator==(const RowSummary & other) const;
};

/// Table IV analogue: fault-free runs per scenario.
struct ScenarioSummary
{
  std::string scenario;
  int runs{0};
  int invalid{0};
  int accidents{0};
  int h1_runs{0};
  int h2_runs{0};
  double hardest_brake{0.0};
  double min_ttc{kInfinity};
  double min_t_fcw{kInfinity};
  double following_distance{std::numeric_limits<double>::quiet_NaN()};
  double min_lane_distance{kInfinity};

  bool operator==(const ScenarioSummary & other) const;
};

struct CampaignSummary
{
  std::vector<ScenarioSummary> fault_free;
  std::vector<RowSummary> rows;
  int invalid_runs{0};

  /// First row matching the key, or nullptr.
  const RowSummary * find(RunGroup group, const std::string & row, const std::string & fault,
                          double sweep_value = std::numeric_limits<double>::quiet_NaN()) const;
  bool operator==(const CampaignSummary & other) const = default;
};

/// Aggregates per (group, row, sweep value) for every fault and for "all".
/// Permutation-invariant in the input. Throws ConfigError when no run is valid.
CampaignSummary aggregate(const std::vector<CampaignRun> & runs,
                          const std::vector<RunResult> & results);

}  // namespace adas_sim

#endif  // ADAS_SIM__CAMPAIGN_HPP_
