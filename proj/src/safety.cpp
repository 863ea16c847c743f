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

#include "adas_sim/safety.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adas_sim
{

double compute_ttc(double rd, double rs)
{
  if (!std::isfinite(rd)) return kInfinity;
  if (rd < 0.0 || std::isnan(rs)) throw HarnessFault("compute_ttc: negative or NaN input");
  if (rs <= 0.0) return kInfinity;
  return rd / rs;
}

AebsThresholds aebs_thresholds(double v_ego, double a_driver, double t_react)
{
  if (!(a_driver > 0.0)) throw ConfigError("aebs: a_driver must be positive");
  if (!(t_react >= 0.0)) throw ConfigError("aebs: T_react must be >= 0");
  const double v = std::max(0.0, v_ego);
  return {t_react + v / a_driver, v / 3.8, v / 5.8, v / 9.8};
}

std::string to_string(AebStage stage)
{
  switch (stage) {
    case AebStage::Inactive: return "Inactive";
    case AebStage::FcwAlert: return "FcwAlert";
    case AebStage::Brake90: return "Brake90";
    case AebStage::Brake95: return "Brake95";
    case AebStage::Brake100: return "Brake100";
  }
  return "Inactive";
}

double brake_fraction(AebStage stage)
{
  switch (stage) {
    case AebStage::Brake90: return 0.90;
    case AebStage::Brake95: return 0.95;
    case AebStage::Brake100: return 1.00;
    default: return 0.0;
  }
}

AebStage stage_for_ttc(double ttc, const AebsThresholds & th)
{
  if (ttc < th.t_fb) return AebStage::Brake100;
  if (ttc < th.t_pb2) return AebStage::Brake95;
  if (ttc < th.t_pb1) return AebStage::Brake90;
  if (ttc < th.t_fcw) return AebStage::FcwAlert;
  return AebStage::Inactive;
}

std::string to_string(AebMode mode)
{
  switch (mode) {
    case AebMode::Off: return "off";
    case AebMode::Compromised: return "aeb-comp";
    case AebMode::Independent: return "aeb-indep";
  }
  return "off";
}

AebsOutput aebs_step(const AebsState & state, const PerceptionFrame & frame, double v_ego)
{
  AebsOutput out;
  out.state = state;
  AebsState & s = out.state;

  const double rd = frame.lead_detected ? frame.reported_rd : kInfinity;
  out.ttc = compute_ttc(std::max(0.0, rd), frame.reported_rs);
  const AebStage fresh = stage_for_ttc(out.ttc, aebs_thresholds(v_ego, s.a_driver, s.t_react));
  out.fcw_alert = fresh >= AebStage::FcwAlert;

  if (!s.enabled) {
    s.stage = fresh;
    return out;
  }

  if (s.latched) {
    s.stage = std::max(s.stage, fresh);
    if (v_ego <= 0.0) s.holding = true;
  } else {
    s.stage = fresh;
    s.latched = fresh >= AebStage::Brake90;
  }

  if (s.latched) {
    ControlCommand cmd;
    cmd.accel_request = -brake_fraction(s.stage) * s.friction * kGravity;
    cmd.source = CommandSource::AEB;
    cmd.t = frame.t;
    out.command = cmd;
  }
  return out;
}

ControlCommand safety_check(const ControlCommand & cmd, const SafetyCheckParams & params)
{
  ControlCommand out = cmd;
  if (params.enabled && out.accel_request) {
    out.accel_request = std::clamp(*out.accel_request, params.accel_min, params.accel_max);
  }
  return out;
}

std::string to_string(DriverAction action)
{
  return action == DriverAction::EmergencyBrake ? "EmergencyBrake" : "SteerToCenter";
}

void DriverParams::validate() const
{
  if (!(t_react >= 0.0)) throw ConfigError("driver: T_react must be >= 0");
  if (!(brake_decel > 0.0)) throw ConfigError("driver: brake_decel must be positive");
  if (!(brake_ramp >= 0.0)) throw ConfigError("driver: brake_ramp must be >= 0");
  if (!(steer_gain > 0.0) || !(steer_heading_gain >= 0.0)) {
    throw ConfigError("driver: steering gains must be positive");
  }
  if (ldw_steps < 1) throw ConfigError("driver: ldw_steps must be >= 1");
}

namespace
{

bool is_pending(const DriverState & s, DriverAction a)
{
  return std::any_of(s.pending.begin(), s.pending.end(),
                     [a](const PendingAction & p) { return p.action == a; });
}

}  // namespace

DriverOutput driver_step(const DriverState & state, const DriverObservation & obs,
                         const DriverParams & params)
{
  DriverOutput out;
  out.state = state;
  DriverState & s = out.state;
  const auto delay = static_cast<std::int64_t>(std::llround(params.t_react / kDt));

  const double nearest_line = std::min(obs.lane_left, obs.lane_right);
  s.ldw_count = nearest_line < params.ldw_distance ? s.ldw_count + 1 : 0;
  const bool ldw = s.ldw_count >= params.ldw_steps;

  const bool closing_inside_gap = obs.rs > 0.0 && obs.rd < obs.gap_target;
  const bool brake_trigger = obs.fcw_alert ||
                             obs.v_ego > params.overspeed_factor * obs.speed_limit ||
                             (obs.ego_accel > params.unexpected_accel && closing_inside_gap) ||
                             obs.rd < params.unsafe_gap || obs.cut_in;
  const bool steer_trigger = ldw || nearest_line < params.lane_trigger;

  if (brake_trigger && !s.brake_since && !is_pending(s, DriverAction::EmergencyBrake)) {
    s.pending.push_back({obs.step + delay, DriverAction::EmergencyBrake, obs.step});
    out.events.push_back({obs.step, DriverAction::EmergencyBrake, false});
  }
  if (steer_trigger && !s.steering && !is_pending(s, DriverAction::SteerToCenter)) {
    s.pending.push_back({obs.step + delay, DriverAction::SteerToCenter, obs.step});
    out.events.push_back({obs.step, DriverAction::SteerToCenter, false});
  }

  for (auto it = s.pending.begin(); it != s.pending.end();) {
    if (it->activation_step > obs.step) {
      ++it;
      continue;
    }
    if (it->action == DriverAction::EmergencyBrake) {
      s.brake_since = obs.step;
    } else {
      s.steering = true;
    }
    out.events.push_back({obs.step, it->action, true});
    it = s.pending.erase(it);
  }

  ControlCommand cmd;
  cmd.source = CommandSource::Driver;
  cmd.t = obs.t;

  if (s.brake_since) {
    const double held = static_cast<double>(obs.step - *s.brake_since + 1) * kDt;
    const double ramp = params.brake_ramp > 0.0 ? std::min(1.0, held / params.brake_ramp) : 1.0;
    cmd.accel_request = -params.brake_decel * ramp;
    const bool threat_clear = !std::isfinite(obs.rd) ||
                              (obs.rs <= 0.0 && obs.rd >= params.release_headway * obs.v_ego);
    if (threat_clear && obs.v_ego <= obs.speed_limit && !obs.fcw_alert) s.brake_since.reset();
  }

  if (s.steering) {
    cmd.curvature_request = clamp_abs(obs.road_curvature - params.steer_gain * obs.center_offset -
                                        params.steer_heading_gain * obs.heading_error,
                                      kCurvatureMax);
    if (std::abs(obs.center_offset) < params.steer_release_offset) s.steering = false;
  }

  if (cmd.accel_request || cmd.curvature_request) out.command = cmd;
  return out;
}

InterventionConfig InterventionConfig::parse(const std::string & list)
{
  InterventionConfig cfg;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty() || item == "none") continue;
    if (item == "driver") {
      cfg.driver = true;
    } else if (item == "safety-check" || item == "safety_check" || item == "sc") {
      cfg.safety_check = true;
    } else if (item == "aeb-comp" || item == "aeb-compromised") {
      if (cfg.aeb != AebMode::Off) throw ConfigError("interventions: more than one AEB mode");
      cfg.aeb = AebMode::Compromised;
    } else if (item == "aeb-indep" || item == "aeb-independent") {
      if (cfg.aeb != AebMode::Off) throw ConfigError("interventions: more than one AEB mode");
      cfg.aeb = AebMode::Independent;
    } else if (item == "ml") {
      cfg.ml = true;
    } else {
      throw ConfigError("interventions: unknown layer '" + item + "'");
    }
  }
  cfg.name = cfg.describe();
  return cfg;
}

std::string InterventionConfig::describe() const
{
  std::string s;
  auto add = [&s](const std::string & part) { s += (s.empty() ? "" : ",") + part; };
  if (driver) add("driver");
  if (safety_check) add("safety-check");
  if (aeb != AebMode::Off) add(to_string(aeb));
  if (ml) add("ml");
  return s.empty() ? "none" : s;
}

void InterventionConfig::validate() const
{
  if (!(driver_t_react >= 0.0) || !std::isfinite(driver_t_react)) {
    throw ConfigError("interventions: driver_T_react must be finite and >= 0");
  }
}

ArbitratedCommand arbitrate(const std::optional<ControlCommand> & aeb,
                            const std::optional<ControlCommand> & driver,
                            const std::optional<ControlCommand> & ml, const ControlCommand & adas,
                            const InterventionConfig & config, const SafetyCheckParams & clamp)
{
  if (!adas.accel_request || !adas.curvature_request) {
    throw HarnessFault("arbitrate: ADAS command must carry both channels");
  }
  SafetyCheckParams sc = clamp;
  sc.enabled = clamp.enabled && config.safety_check;

  ArbitratedCommand out;
  if (aeb && aeb->accel_request) {
    out.accel = *aeb->accel_request;
    out.long_source = CommandSource::AEB;
  } else if (driver && driver->accel_request) {
    out.accel = *driver->accel_request;
    out.long_source = CommandSource::Driver;
  } else {
    const ControlCommand & sw = (ml && ml->accel_request) ? *ml : adas;
    const ControlCommand checked = safety_check(sw, sc);
    out.accel = *checked.accel_request;
    out.long_source = sw.source;
    out.clamped = *checked.accel_request != *sw.accel_request;
  }

  if (driver && driver->curvature_request) {
    out.curvature = *driver->curvature_request;
    out.lat_source = CommandSource::Driver;
  } else if (ml && ml->curvature_request) {
    out.curvature = *ml->curvature_request;
    out.lat_source = CommandSource::ML;
  } else {
    out.curvature = *adas.curvature_request;
    out.lat_source = CommandSource::ADAS;
  }
  return out;
}

}  // namespace adas_sim
