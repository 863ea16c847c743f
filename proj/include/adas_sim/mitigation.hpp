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

#ifndef ADAS_SIM__MITIGATION_HPP_
#define ADAS_SIM__MITIGATION_HPP_

#include <array>
#include <cstddef>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "adas_sim/common.hpp"
#include "adas_sim/perception.hpp"

namespace adas_sim
{

// ---------------------------------------------------------------------------
// Accumulated-error detector

struct CusumState
{
  double S{0.0};
  double b{0.05};
  double tau{0.5};
  bool recovery_mode{false};
};

struct CusumResult
{
  CusumState state;
  double y{0.0};        // executed output
  double delta{0.0};
  bool entered{false};  // recovery started this step
  bool exited{false};   // recovery ended this step
};

/// One step of the recursion S' = max(0, S + |y_ml - y_op| - b). Enters
/// recovery once S' > tau; while recovering the executed output is y_ml and
/// the first step with delta <= b leaves recovery and zeroes S. Throws
/// HarnessFault on a non-finite delta.
CusumResult cusum_step(const CusumState & state, double y_ml, double y_op);

// ---------------------------------------------------------------------------
// Predictor input window

constexpr std::size_t kWindowLength = 20;
constexpr std::size_t kStateFeatures = 8;
constexpr std::size_t kOutputChannels = 2;  // accel, curvature

using StateVector = std::array<double, kStateFeatures>;
using OutputVector = std::array<double, kOutputChannels>;

/// Speed, RD, RS, lead flag, lane-line distances, heading error and road
/// curvature from the independent channel. Absent leads read as rd_cap.
StateVector state_features(const PerceptionFrame & independent, double ego_speed,
                           double rd_cap = 150.0);

/// Sliding window of the last 20 state frames and the 20 outputs executed
/// before the current step, oldest first.
class PredictorWindow
{
public:
  void push_state(const StateVector & x);
  void push_output(const OutputVector & y);
  bool ready() const;
  void clear();

  const std::deque<StateVector> & states() const { return states_; }
  const std::deque<OutputVector> & outputs() const { return outputs_; }

private:
  std::deque<StateVector> states_;
  std::deque<OutputVector> outputs_;
};

// ---------------------------------------------------------------------------
// Predictors

class Predictor
{
public:
  virtual ~Predictor() = default;
  /// Expected (accel, curvature) for the newest frame in the window.
  virtual OutputVector predict(const PredictorWindow & window) const = 0;
};

/// One affine function of the flattened window.
struct AffinePiece
{
  double intercept{0.0};
  std::vector<double> weights;
};

/// Per output channel, the minimum over a few ridge-fitted affine pieces of
/// the flattened window. One piece is plain ridge regression; more pieces let
/// the model represent saturations and min() switching in the controller it
/// imitates.
class PiecewiseLinearPredictor : public Predictor
{
public:
  static constexpr int kFormatVersion = 1;

  OutputVector predict(const PredictorWindow & window) const override;

  /// Flattened regressor row for a full window.
  std::vector<double> regressors(const PredictorWindow & window) const;
  std::size_t feature_count() const;

  bool use_output_history{false};
  double rd_cap{150.0};
  std::array<std::vector<AffinePiece>, kOutputChannels> pieces;
  // Output range seen in training; predictions are clipped to it.
  OutputVector y_min{-kInfinity, -kInfinity};
  OutputVector y_max{kInfinity, kInfinity};
  // Calibrated detector parameters, per channel.
  OutputVector b0{0.05, 0.05};
  OutputVector tau{0.5, 0.5};
  OutputVector heldout_rmse{0.0, 0.0};
  std::size_t trained_traces{0};
  std::size_t trained_samples{0};

  void save(const std::string & path) const;
  static PiecewiseLinearPredictor load(const std::string & path);
};

// ---------------------------------------------------------------------------
// Training

/// One step of a fault-free trace, as stored in the per-run time series.
struct TraceSample
{
  StateVector x{};
  OutputVector y_op{};    // ADAS request
  OutputVector y_exec{};  // what the actuators received
};

using Trace = std::vector<TraceSample>;

struct TrainOptions
{
  std::size_t min_traces{10};
  std::size_t stride{5};         // use every stride-th window
  double ridge{1e-3};            // on standardized regressors
  bool use_output_history{false};
  std::array<int, kOutputChannels> pieces{3, 1};
  int max_iterations{50};
  double b0_factor{3.0};         // b0 = factor * p99(delta)
  double tau_factor{10.0};       // tau = factor * b0
};

/// Fits the predictor on fault-free traces. Identical traces are collapsed
/// first, so duplicating the input set does not change the model. Throws
/// ConfigError when fewer than min_traces traces are supplied.
PiecewiseLinearPredictor predictor_train(const std::vector<Trace> & traces,
                                         const TrainOptions & options = {});

/// Per-channel open-loop delta = |y_ml - y_op| over the traces.
std::vector<OutputVector> replay_deltas(const PiecewiseLinearPredictor & model,
                                        const std::vector<Trace> & traces);

}  // namespace adas_sim

#endif  // ADAS_SIM__MITIGATION_HPP_
