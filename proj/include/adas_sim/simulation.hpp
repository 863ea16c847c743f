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

#ifndef ADAS_SIM__SIMULATION_HPP_
#define ADAS_SIM__SIMULATION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "adas_sim/controllers.hpp"
#include "adas_sim/hazard.hpp"
#include "adas_sim/mitigation.hpp"
#include "adas_sim/perception.hpp"
#include "adas_sim/safety.hpp"
#include "adas_sim/scenario.hpp"

namespace adas_sim
{

struct MlParams
{
  std::shared_ptr<const PiecewiseLinearPredictor> model;
  // Overrides for the calibration stored in the model file.
  std::optional<OutputVector> b0;
  std::optional<OutputVector> tau;
};

struct RunSpec
{
  std::size_t index{0};
  int rep{0};
  std::uint64_t seed{0};
  ScenarioSpec scenario;
  FaultSpec fault;
  // Per-run uniform shift of the patch start, in [0, patch_jitter) metres.
  double patch_jitter{0.0};
  InterventionConfig interventions;
  AccParams acc;
  AlcParams alc;
  SensorParams sensors;
  DriverParams driver;
  double a_driver{4.5};
  double aeb_t_react{2.5};
  HazardParams hazards;
  MlParams ml;
  int steps{kStepsPerRun};
};

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_uniform(std::mt19937_64 & rng);

/// Closed-loop run. Never throws for simulation faults: those end the run and
/// fill invalid_reason. Configuration problems still throw ConfigError.
RunLog simulate(const RunSpec & spec);

/// simulate() followed by finalize_metrics().
RunResult run_once(const RunSpec & spec);

/// Training view of a logged run: independent-channel state, ADAS request
/// and executed command per step.
Trace trace_from_records(const std::vector<StepRecord> & records, double rd_cap = 150.0);

}  // namespace adas_sim

#endif  // ADAS_SIM__SIMULATION_HPP_
