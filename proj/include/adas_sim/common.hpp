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

#ifndef ADAS_SIM__COMMON_HPP_
#define ADAS_SIM__COMMON_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace adas_sim
{

inline constexpr double kDt = 0.01;
inline constexpr int kStepsPerRun = 10000;
inline constexpr double kGravity = 9.8;          // full-brake deceleration at mu = 1
inline constexpr double kMaxPropulsion = 2.0;    // traction-limited forward accel at mu = 1
inline constexpr double kWheelbase = 2.7;
inline constexpr double kMaxSteerRad = 10.0 * std::numbers::pi / 180.0;
inline const double kCurvatureMax = std::tan(kMaxSteerRad) / kWheelbase;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

inline constexpr double mph_to_mps(double mph) { return mph * 0.44704; }

/// Bad user input: scenario/campaign files, CLI arguments, parameter ranges.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failures; the message always carries the offending path.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// The simulation reached a state it cannot continue from (non-finite values,
/// empty command sets). Campaigns mark the run Invalid and carry on.
class HarnessFault : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

inline double clamp_abs(double value, double limit)
{
  return value > limit ? limit : (value < -limit ? -limit : value);
}

inline double wrap_angle(double a)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  return a - std::numbers::pi;
}

}  // namespace adas_sim

#endif  // ADAS_SIM__COMMON_HPP_
