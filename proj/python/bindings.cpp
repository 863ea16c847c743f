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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>

#include "adas_sim/campaign.hpp"
#include "adas_sim/config.hpp"
#include "adas_sim/mitigation.hpp"
#include "adas_sim/report.hpp"
#include "adas_sim/safety.hpp"
#include "adas_sim/simulation.hpp"

namespace py = pybind11;
using namespace adas_sim;

namespace
{

py::array_t<double> column(const std::vector<StepRecord> & records, double StepRecord::*member)
{
  py::array_t<double> out(static_cast<py::ssize_t>(records.size()));
  auto v = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < records.size(); ++i) v(static_cast<py::ssize_t>(i)) = records[i].*member;
  return out;
}

py::dict simulate_one(const std::string & scenario, const std::string & fault,
                      const std::string & interventions, std::uint64_t seed, double gap,
                      double friction, double t_react, const std::string & model)
{
  const CampaignConfig c = CampaignConfig::paper_default();
  RunSpec s;
  s.seed = seed;
  s.scenario = scenario.ends_with(".toml")
                 ? load_scenario_file(scenario)
                 : builtin_scenario(scenario_id_from_string(scenario), gap, friction);
  s.fault = c.fault;
  s.fault.kind = fault_kind_from_string(fault);
  s.patch_jitter = c.patch_jitter;
  s.interventions = InterventionConfig::parse(interventions);
  s.interventions.driver_t_react = t_react;
  s.acc = c.acc;
  s.alc = c.alc;
  s.sensors = c.sensors;
  s.driver = c.driver;
  s.a_driver = c.a_driver;
  s.aeb_t_react = c.aeb_t_react;
  s.hazards = c.hazards;
  if (s.interventions.ml) {
    if (model.empty()) throw ConfigError("simulate: the ml layer needs a model path");
    s.ml.model = std::make_shared<PiecewiseLinearPredictor>(PiecewiseLinearPredictor::load(model));
  }

  RunLog log;
  {
    py::gil_scoped_release release;
    log = simulate(s);
  }
  const RunResult r = finalize_metrics(log);

  py::dict triggers;
  for (std::size_t k = 0; k < kTriggerCount; ++k) {
    const TriggerRecord & t = r.triggers[k];
    if (t.fired) triggers[py::str(to_string(static_cast<Trigger>(k)))] = t.first_trigger;
  }
  py::list events;
  for (const auto & e : log.events) events.append(py::make_tuple(e.step, e.t, e.signal, e.source, e.value));

  py::dict out;
  out["outcome"] = to_string(r.outcome);
  out["steps"] = r.steps;
  out["end_time"] = r.end_time;
  out["fault_activation"] = r.fault_activation;
  out["min_ttc"] = r.min_ttc;
  out["hardest_brake"] = r.hardest_brake;
  out["h1_count"] = r.h1_count;
  out["h2_count"] = r.h2_count;
  out["triggers"] = triggers;
  out["events"] = events;
  out["invalid_reason"] = r.invalid_reason;
  out["t"] = column(log.records, &StepRecord::t);
  out["speed"] = column(log.records, &StepRecord::speed);
  out["accel"] = column(log.records, &StepRecord::accel);
  out["curvature"] = column(log.records, &StepRecord::curvature);
  out["truth_rd"] = column(log.records, &StepRecord::truth_rd);
  out["reported_rd"] = column(log.records, &StepRecord::reported_rd);
  out["lane_left"] = column(log.records, &StepRecord::lane_left);
  out["lane_right"] = column(log.records, &StepRecord::lane_right);
  return out;
}

py::dict campaign(const std::string & config_path, const std::string & out_dir)
{
  const CampaignConfig c = load_campaign_file(config_path);
  CampaignOutput o;
  {
    py::gil_scoped_release release;
    o = execute_campaign(c, out_dir);
  }
  py::dict out;
  out["runs"] = o.runs.size();
  out["summary_csv"] = summary_csv(o.summary);
  out["fault_free_csv"] = fault_free_csv(o.summary);
  out["markdown"] = render_markdown(o.summary);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "Closed-loop ADAS fault-injection simulator.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def(
    "aebs_thresholds",
    [](double v, double a_driver, double t_react) {
      const AebsThresholds t = aebs_thresholds(v, a_driver, t_react);
      return py::make_tuple(t.t_fcw, t.t_pb1, t.t_pb2, t.t_fb);
    },
    py::arg("v_ego"), py::arg("a_driver") = 4.5, py::arg("t_react") = 2.5,
    "(t_fcw, t_pb1, t_pb2, t_fb) in seconds.");

  m.def(
    "cusum_step",
    [](double S, double b, double tau, bool recovery, double y_ml, double y_op) {
      CusumState s{S, b, tau, recovery};
      const CusumResult r = cusum_step(s, y_ml, y_op);
      return py::make_tuple(r.state.S, r.state.recovery_mode, r.y, r.entered, r.exited);
    },
    py::arg("S"), py::arg("b"), py::arg("tau"), py::arg("recovery"), py::arg("y_ml"),
    py::arg("y_op"), "One detector step: (S, recovery, executed output, entered, exited).");

  m.def("simulate", &simulate_one, py::arg("scenario") = "S1", py::arg("fault") = "none",
        py::arg("interventions") = "none", py::arg("seed") = 0, py::arg("gap") = 60.0,
        py::arg("friction") = 1.0, py::arg("t_react") = 2.5, py::arg("model") = "",
        "One closed-loop run with the paper-default parameters.");

  m.def("run_campaign", &campaign, py::arg("config"), py::arg("out_dir") = "",
        "Runs a campaign TOML; writes results when out_dir is set.");

  m.def(
    "render_report",
    [](const std::string & dir) {
      const auto root = std::string(dir) + "/";
      return render_markdown(
        parse_summary(read_text_file(root + "summary.csv"), read_text_file(root + "fault_free.csv")));
    },
    py::arg("results_dir"), "Markdown report from a campaign output directory.");

  m.def(
    "run_seed",
    [](std::uint64_t base, const std::string & fault, double gap, const std::string & scenario,
       int rep) { return run_seed(base, fault_kind_from_string(fault), gap, scenario, rep); },
    py::arg("base_seed"), py::arg("fault"), py::arg("init_gap"), py::arg("scenario"),
    py::arg("rep"));
}
