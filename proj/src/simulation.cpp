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

#include "adas_sim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace adas_sim
{

double unit_uniform(std::mt19937_64 & rng)
{
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

namespace
{

bool cut_in_ahead(const WorldState & world)
{
  const double lane_center = world.ego_lane * world.road->lane_width();
  for (const auto & v : world.traffic) {
    if (!v.changing_lane || std::abs(v.lateral_to - lane_center) > 1e-6) continue;
    if (v.frenet.s <= world.ego_frenet.s) continue;
    if (bumper_gap(world, v) < 2.0 * world.ego.speed) return true;
  }
  return false;
}

class EventSink
{
public:
  explicit EventSink(std::vector<LogEvent> & events) : events_(events) {}

  void emit(const WorldState & w, std::string signal, std::string source, double value)
  {
    events_.push_back({w.step_index, w.t, std::move(signal), std::move(source), value});
  }

private:
  std::vector<LogEvent> & events_;
};

RunMeta meta_for(const RunSpec & spec)
{
  RunMeta m;
  m.index = spec.index;
  m.scenario = spec.scenario.id;
  m.fault = to_string(spec.fault.kind);
  m.init_gap = spec.scenario.init_gap;
  m.friction = spec.scenario.friction;
  m.interventions = spec.interventions.describe();
  m.t_react = spec.interventions.driver_t_react;
  m.aeb_t_react = spec.aeb_t_react;
  m.rep = spec.rep;
  m.seed = spec.seed;
  m.safety_check = spec.interventions.safety_check;
  m.a_driver = spec.a_driver;
  return m;
}

}  // namespace

RunLog simulate(const RunSpec & spec)
{
  spec.scenario.validate();
  spec.fault.validate();
  spec.interventions.validate();
  spec.acc.validate();
  spec.alc.validate();
  if (spec.steps <= 0) throw ConfigError("run: steps must be positive");
  if (spec.interventions.ml && !spec.ml.model) {
    throw ConfigError("run: ML mitigation requested without a predictor model");
  }

  RunLog log;
  log.meta = meta_for(spec);
  log.records.reserve(static_cast<std::size_t>(spec.steps));
  EventSink sink(log.events);

  std::mt19937_64 rng(spec.seed);
  const double jitter = spec.scenario.trigger_jitter;
  const double time_shift = jitter > 0.0 ? (2.0 * unit_uniform(rng) - 1.0) * jitter : 0.0;
  FaultSpec fault = spec.fault;
  fault.patch_start += unit_uniform(rng) * spec.patch_jitter;

  const double mu = spec.scenario.friction;
  WorldState world = initial_world(spec.scenario, spec.seed);
  TrafficScript script(spec.scenario, time_shift);
  FaultInjector injector(fault);
  AlcController alc(spec.alc);
  HazardMonitor monitor(spec.hazards);

  AebsState aebs;
  aebs.a_driver = spec.a_driver;
  aebs.t_react = spec.aeb_t_react;
  aebs.input_source =
    spec.interventions.aeb == AebMode::Independent ? AebMode::Independent : AebMode::Compromised;
  aebs.enabled = spec.interventions.aeb != AebMode::Off;
  aebs.friction = mu;

  DriverParams driver_params = spec.driver;
  driver_params.t_react = spec.interventions.driver_t_react;
  driver_params.validate();
  DriverState driver;

  const bool ml_on = spec.interventions.ml;
  PredictorWindow window;
  CusumState cusum[kOutputChannels];
  if (ml_on) {
    const OutputVector b0 = spec.ml.b0.value_or(spec.ml.model->b0);
    const OutputVector tau = spec.ml.tau.value_or(spec.ml.model->tau);
    for (std::size_t c = 0; c < kOutputChannels; ++c) {
      cusum[c].b = b0[c];
      cusum[c].tau = tau[c];
    }
  }

  bool prev_rd = false;
  bool prev_curv = false;
  bool prev_clamped = false;
  bool aeb_braking = false;
  AebStage prev_stage = AebStage::Inactive;
  CommandSource prev_long = CommandSource::ADAS;
  CommandSource prev_lat = CommandSource::ADAS;

  try {
    for (int k = 0; k < spec.steps; ++k) {
      world.step_index = k;
      world.t = k * kDt;

      StepRecord rec;
      rec.step = k;
      rec.t = world.t;
      rec.x = world.ego.x;
      rec.y = world.ego.y;
      rec.s = world.ego_frenet.s;
      rec.d = world.ego_frenet.d;
      rec.speed = world.ego.speed;

      const LaneOffset lane = lateral_offset(world, kEgoId);
      rec.lane_left = lane.left;
      rec.lane_right = lane.right;
      rec.heading_error = lane.heading_error;
      VehicleId lead_id = -1;
      rec.truth_rd = truth_forward_gap(world, &lead_id);
      if (const TrafficVehicle * lead = world.find(lead_id)) {
        rec.truth_rs = world.ego.speed - lead->state.speed;
      }

      for (auto & h : monitor.step(world)) {
        sink.emit(world, to_string(h.kind), "monitor", h.truth_rd);
        log.hazards.push_back(std::move(h));
      }
      if (monitor.accident()) {
        if (!log.records.empty()) {
          const StepRecord & prev = log.records.back();
          rec.accel = prev.accel;
          rec.curvature = prev.curvature;
          rec.long_source = prev.long_source;
          rec.lat_source = prev.lat_source;
        }
        log.records.push_back(rec);
        break;
      }

      const PerceptionFrame truth = sense_ground_truth(world, spec.sensors);
      const PerceptionFrame indep = independent_sense(world, spec.sensors);
      const PerceptionFrame frame = injector.apply(truth, world.ego_frenet.s);
      rec.reported_rd = frame.lead_detected ? frame.reported_rd : kInfinity;
      rec.reported_rs = frame.reported_rs;
      rec.reported_curvature = frame.reported_curvature;
      rec.indep_lead = indep.lead_detected ? 1 : 0;
      rec.indep_rd = indep.lead_detected ? indep.reported_rd : kInfinity;
      rec.indep_rs = indep.reported_rs;
      rec.indep_curvature = indep.reported_curvature;
      rec.fault = (injector.rd_active() ? 1 : 0) | (injector.curvature_active() ? 2 : 0);
      if (injector.rd_active() != prev_rd) sink.emit(world, "fault", "rd", prev_rd ? 0.0 : 1.0);
      if (injector.curvature_active() != prev_curv) {
        sink.emit(world, "fault", "curvature", prev_curv ? 0.0 : 1.0);
      }
      prev_rd = injector.rd_active();
      prev_curv = injector.curvature_active();

      ControlCommand adas;
      adas.source = CommandSource::ADAS;
      adas.t = world.t;
      adas.accel_request = acc_step(frame, world.ego, spec.acc);
      adas.curvature_request = alc.step(frame, world.ego);
      rec.adas_accel = *adas.accel_request;
      rec.adas_curvature = *adas.curvature_request;

      const PerceptionFrame & aeb_frame =
        spec.interventions.aeb == AebMode::Independent ? indep : frame;
      const AebsOutput ao = aebs_step(aebs, aeb_frame, world.ego.speed);
      aebs = ao.state;
      rec.aeb_stage = static_cast<int>(aebs.stage);
      rec.fcw = ao.fcw_alert ? 1 : 0;
      if (aebs.stage != prev_stage) {
        sink.emit(world, "aeb_stage", to_string(aebs.stage), static_cast<double>(aebs.stage));
        prev_stage = aebs.stage;
      }
      if (ao.command && !aeb_braking) {
        aeb_braking = true;
        sink.emit(world, "aeb_brake", to_string(aebs.stage), *ao.command->accel_request);
      }

      std::optional<ControlCommand> driver_cmd;
      if (spec.interventions.driver) {
        DriverObservation obs;
        obs.step = k;
        obs.t = world.t;
        obs.fcw_alert = ao.fcw_alert;
        obs.v_ego = world.ego.speed;
        obs.ego_accel = world.ego.accel;
        obs.speed_limit = spec.scenario.speed_limit;
        obs.rd = rec.truth_rd;
        obs.rs = rec.truth_rs;
        obs.gap_target = spec.acc.gap_target(world.ego.speed);
        obs.lane_left = lane.left;
        obs.lane_right = lane.right;
        obs.center_offset = lane.center_offset;
        obs.heading_error = lane.heading_error;
        obs.road_curvature = world.road->curvature_at(world.ego_frenet.s);
        obs.friction = mu;
        obs.cut_in = cut_in_ahead(world);
        DriverOutput dout = driver_step(driver, obs, driver_params);
        driver = std::move(dout.state);
        driver_cmd = dout.command;
        for (const auto & e : dout.events) {
          sink.emit(world, e.executed ? "driver_action" : "driver_trigger", to_string(e.action),
                    e.executed ? 1.0 : 0.0);
        }
        rec.driver_brake = driver.brake_since ? 1 : 0;
        rec.driver_steer = driver.steering ? 1 : 0;
      }

      std::optional<ControlCommand> ml_cmd;
      if (ml_on) {
        window.push_state(state_features(indep, world.ego.speed, spec.ml.model->rd_cap));
        if (window.ready()) {
          const OutputVector y_ml = spec.ml.model->predict(window);
          const OutputVector y_op{*adas.accel_request, *adas.curvature_request};
          ControlCommand mc;
          mc.source = CommandSource::ML;
          mc.t = world.t;
          for (std::size_t c = 0; c < kOutputChannels; ++c) {
            const CusumResult cr = cusum_step(cusum[c], y_ml[c], y_op[c]);
            cusum[c] = cr.state;
            const bool recovering = cr.state.recovery_mode || cr.exited;
            if (cr.entered) sink.emit(world, "ml_recovery", c == 0 ? "long" : "lat", 1.0);
            if (cr.exited) sink.emit(world, "ml_recovery", c == 0 ? "long" : "lat", 0.0);
            if (recovering) {
              (c == 0 ? mc.accel_request : mc.curvature_request) = cr.y;
              rec.recovery |= 1 << c;
            }
          }
          rec.ml_accel = y_ml[0];
          rec.ml_curvature = y_ml[1];
          if (mc.accel_request || mc.curvature_request) ml_cmd = mc;
        }
        rec.cusum_long = cusum[0].S;
        rec.cusum_lat = cusum[1].S;
      }

      const ArbitratedCommand cmd =
        arbitrate(ao.command, driver_cmd, ml_cmd, adas, spec.interventions);
      rec.accel = cmd.accel;
      rec.curvature = cmd.curvature;
      rec.long_source = static_cast<int>(cmd.long_source);
      rec.lat_source = static_cast<int>(cmd.lat_source);
      rec.clamped = cmd.clamped ? 1 : 0;
      if (cmd.clamped && !prev_clamped) {
        sink.emit(world, "safety_clamp", to_string(cmd.long_source),
                  cmd.long_source == CommandSource::ML ? *ml_cmd->accel_request
                                                       : *adas.accel_request);
      }
      prev_clamped = cmd.clamped;
      if (cmd.long_source != prev_long) {
        sink.emit(world, "long_source", to_string(cmd.long_source), cmd.accel);
        prev_long = cmd.long_source;
      }
      if (cmd.lat_source != prev_lat) {
        sink.emit(world, "lat_source", to_string(cmd.lat_source), cmd.curvature);
        prev_lat = cmd.lat_source;
      }
      if (ml_on) window.push_output({cmd.accel, cmd.curvature});
      log.records.push_back(rec);

      world.ego = step_vehicle(world.ego, cmd.accel, cmd.curvature, mu, kDt);
      const auto traffic_cmds = script.update(world);
      step_traffic(world, traffic_cmds, mu, kDt);
      refresh_ego_frenet(world);
    }
  } catch (const HarnessFault & e) {
    log.invalid_reason = e.what();
  }
  return log;
}

RunResult run_once(const RunSpec & spec) { return finalize_metrics(simulate(spec)); }

Trace trace_from_records(const std::vector<StepRecord> & records, double rd_cap)
{
  Trace trace;
  trace.reserve(records.size());
  for (const auto & r : records) {
    PerceptionFrame f;
    f.lead_detected = r.indep_lead != 0;
    f.reported_rd = r.indep_rd;
    f.reported_rs = r.indep_rs;
    f.lane_left = r.lane_left;
    f.lane_right = r.lane_right;
    f.lane_heading = r.heading_error;
    f.reported_curvature = r.indep_curvature;
    TraceSample s;
    s.x = state_features(f, r.speed, rd_cap);
    s.y_op = {r.adas_accel, r.adas_curvature};
    s.y_exec = {r.accel, r.curvature};
    trace.push_back(s);
  }
  return trace;
}

}  // namespace adas_sim
