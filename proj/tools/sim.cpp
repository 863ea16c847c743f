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

// Command-line front end. Exit codes: 0 ok, 2 configuration error, 3 I/O error,
// 1 anything else.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "adas_sim/config.hpp"
#include "adas_sim/report.hpp"

namespace fs = std::filesystem;
using namespace adas_sim;

namespace
{

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct RunArgs
{
  std::string scenario{"S1"};
  std::string fault{"none"};
  std::string interventions{"none"};
  std::uint64_t seed{0};
  double gap{60.0};
  double friction{1.0};
  double t_react{2.5};
  std::string config;
  std::string model;
  std::string out;
};

int cmd_run(const RunArgs & a)
{
  CampaignConfig c = a.config.empty() ? CampaignConfig::paper_default() : load_campaign_file(a.config);
  RunSpec s;
  s.seed = a.seed;
  if (a.scenario.size() > 5 && a.scenario.ends_with(".toml")) {
    s.scenario = load_scenario_file(a.scenario);
  } else {
    s.scenario = builtin_scenario(scenario_id_from_string(a.scenario), a.gap, a.friction);
  }
  s.fault = c.fault;
  s.fault.kind = fault_kind_from_string(a.fault);
  s.patch_jitter = c.patch_jitter;
  s.interventions = InterventionConfig::parse(a.interventions);
  s.interventions.driver_t_react = a.t_react;
  s.acc = c.acc;
  s.alc = c.alc;
  s.sensors = c.sensors;
  s.driver = c.driver;
  s.a_driver = c.a_driver;
  s.aeb_t_react = c.aeb_t_react;
  s.hazards = c.hazards;
  s.ml.b0 = c.ml_b0;
  s.ml.tau = c.ml_tau;
  if (s.interventions.ml) {
    const std::string path = !a.model.empty() ? a.model : c.model_path;
    if (path.empty()) throw ConfigError("run: --interventions ml needs --model");
    s.ml.model = std::make_shared<PiecewiseLinearPredictor>(PiecewiseLinearPredictor::load(path));
  }

  const RunLog log = simulate(s);
  const RunResult r = finalize_metrics(log);
  if (!a.out.empty()) {
    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw IoError("cannot create directory " + a.out);
    write_timeseries_csv((fs::path(a.out) / "timeseries.csv").string(), log.records);
    write_events_csv((fs::path(a.out) / "events.csv").string(), log.events);
  }

  std::printf("scenario=%s fault=%s interventions=%s seed=%llu\n", s.scenario.id.c_str(),
              to_string(s.fault.kind).c_str(), s.interventions.describe().c_str(),
              static_cast<unsigned long long>(s.seed));
  std::printf("outcome=%s steps=%lld end_time=%.2f\n", to_string(r.outcome).c_str(),
              static_cast<long long>(r.steps), r.end_time);
  if (!r.invalid_reason.empty()) std::printf("invalid_reason=%s\n", r.invalid_reason.c_str());
  std::printf("fault_activation=%s min_ttc=%s min_t_fcw=%s hardest_brake=%.3f h1=%d h2=%d\n",
              format_number(r.fault_activation).c_str(), format_number(r.min_ttc).c_str(),
              format_number(r.min_t_fcw).c_str(), r.hardest_brake, r.h1_count, r.h2_count);
  for (std::size_t k = 0; k < kTriggerCount; ++k) {
    const TriggerRecord & t = r.triggers[k];
    if (!t.fired) continue;
    std::printf("trigger %s first=%.2f mitigation_time=%s\n",
                to_string(static_cast<Trigger>(k)).c_str(), t.first_trigger,
                format_number(t.mitigation_time).c_str());
  }
  return 0;
}

int cmd_campaign(const std::string & config, const std::string & out, int threads)
{
  CampaignConfig c = load_campaign_file(config);
  if (threads > 0) c.threads = threads;
  const CampaignOutput o = execute_campaign(c, out);
  std::printf("%zu runs, %d invalid, results in %s\n", o.runs.size(), o.summary.invalid_runs,
              out.c_str());
  return 0;
}

int cmd_report(const std::string & in, const std::string & format, const std::string & out)
{
  const fs::path dir(in);
  const std::string rows = read_text_file((dir / "summary.csv").string());
  const std::string ff = read_text_file((dir / "fault_free.csv").string());
  std::string text;
  if (format == "markdown" || format == "md") {
    text = render_markdown(parse_summary(rows, ff));
  } else if (format == "csv") {
    text = rows;
  } else {
    throw ConfigError("report: --format must be markdown or csv");
  }
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return 0;
}

int cmd_train(const std::string & traces_dir, const std::string & out, const std::string & config,
              int min_traces)
{
  TrainOptions opt = config.empty() ? TrainOptions{} : load_campaign_file(config).train;
  if (min_traces > 0) opt.min_traces = static_cast<std::size_t>(min_traces);
  const auto traces = load_traces(traces_dir);
  const PiecewiseLinearPredictor m = predictor_train(traces, opt);
  m.save(out);
  std::printf("trained on %zu traces (%zu samples); held-out rmse %.6g %.6g; b0 %.6g %.6g; "
              "tau %.6g %.6g\n",
              m.trained_traces, m.trained_samples, m.heldout_rmse[0], m.heldout_rmse[1], m.b0[0],
              m.b0[1], m.tau[0], m.tau[1]);
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Closed-loop ADAS resilience simulator"};
  app.require_subcommand(1);

  RunArgs run;
  auto * run_cmd = app.add_subcommand("run", "Simulate one run and print its metrics");
  run_cmd->add_option("--scenario", run.scenario, "S1..S6 or a scenario .toml file");
  run_cmd->add_option("--fault", run.fault, "none, rd, curvature or mixed");
  run_cmd->add_option("--interventions", run.interventions,
                      "Comma list: driver, safety-check, aeb-comp, aeb-indep, ml");
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_option("--gap", run.gap, "Initial gap to the lead (m)");
  run_cmd->add_option("--friction", run.friction, "Road friction factor");
  run_cmd->add_option("--t-react", run.t_react, "Driver reaction time (s)");
  run_cmd->add_option("--config", run.config, "Campaign TOML supplying controller parameters");
  run_cmd->add_option("--model", run.model, "Predictor model file for the ml layer");
  run_cmd->add_option("--out", run.out, "Directory for timeseries.csv and events.csv");

  std::string campaign_config;
  std::string campaign_out;
  int threads = 0;
  auto * camp_cmd = app.add_subcommand("campaign", "Run a campaign grid");
  camp_cmd->add_option("--config", campaign_config)->required();
  camp_cmd->add_option("--out", campaign_out)->required();
  camp_cmd->add_option("--threads", threads, "Worker cap (SIM_THREADS also applies)");

  std::string report_in;
  std::string report_format = "markdown";
  std::string report_out;
  auto * rep_cmd = app.add_subcommand("report", "Render a campaign summary");
  rep_cmd->add_option("--in", report_in)->required();
  rep_cmd->add_option("--format", report_format, "markdown or csv");
  rep_cmd->add_option("--out", report_out, "Write to a file instead of stdout");

  std::string traces;
  std::string model_out;
  std::string train_config;
  int min_traces = 0;
  auto * train_cmd = app.add_subcommand("train-predictor", "Fit the ML predictor");
  train_cmd->add_option("--traces", traces, "Directory of fault-free time-series CSVs")->required();
  train_cmd->add_option("--out", model_out)->required();
  train_cmd->add_option("--config", train_config, "Campaign TOML whose [ml] section sets options");
  train_cmd->add_option("--min-traces", min_traces);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*camp_cmd) return cmd_campaign(campaign_config, campaign_out, threads);
    if (*rep_cmd) return cmd_report(report_in, report_format, report_out);
    if (*train_cmd) return cmd_train(traces, model_out, train_config, min_traces);
  } catch (const ConfigError & e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError & e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
