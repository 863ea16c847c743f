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

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <random>

#include "adas_sim/campaign.hpp"
#include "adas_sim/config.hpp"
#include "adas_sim/report.hpp"
#include "doctest.h"

using namespace adas_sim;

namespace
{

CampaignConfig one_row(const char * row)
{
  CampaignConfig c;
  c.fault_free = false;
  c.rows = {InterventionConfig::parse(row)};
  return c;
}

CampaignRun matrix_run(std::size_t index, FaultKind fault, const std::string & row = "driver")
{
  CampaignRun r;
  r.group = RunGroup::Matrix;
  r.row = row;
  r.spec.index = index;
  r.spec.fault.kind = fault;
  return r;
}

RunResult outcome(Outcome o, bool armed = true)
{
  RunResult r;
  r.outcome = o;
  r.fault_armed = armed;
  return r;
}

}  // namespace

TEST_CASE("grid sizes")
{
  CHECK(expand_grid(one_row("none")).size() == 360);

  CampaignConfig two = one_row("none");
  two.rows.push_back(InterventionConfig::parse("driver"));
  CHECK(expand_grid(two).size() == 720);

  CampaignConfig single = one_row("none");
  single.faults = {FaultKind::RelativeDistance};
  single.init_gaps = {60.0};
  single.scenarios = {ScenarioId::S3};
  single.repetitions = 1;
  CHECK(expand_grid(single).size() == 1);

  CampaignConfig empty = one_row("none");
  empty.scenarios.clear();
  CHECK_THROWS_AS(expand_grid(empty), ConfigError);
}

TEST_CASE("grid is deterministic and seeds are paired across rows and sweeps")
{
  CampaignConfig c = CampaignConfig::paper_default();
  const auto a = expand_grid(c);
  const auto b = expand_grid(c);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 120 + 8 * 360 + 6 * 360 + 4 * 360);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].spec.index == i);
    CHECK(a[i].spec.seed == b[i].spec.seed);
  }
  // Row 0 and row 1 of the matrix visit the same cells with the same seeds.
  const std::size_t first = 120;
  for (std::size_t i = 0; i < 360; ++i) CHECK(a[first + i].spec.seed == a[first + 360 + i].spec.seed);
  CHECK(run_seed(1, FaultKind::Mixed, 60.0, "S1", 0) != run_seed(1, FaultKind::Mixed, 60.0, "S1", 1));
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("aggregate rates")
{
  std::vector<CampaignRun> runs;
  std::vector<RunResult> results;
  for (std::size_t i = 0; i < 120; ++i) {
    runs.push_back(matrix_run(i, FaultKind::RelativeDistance));
    results.push_back(outcome(i < 59 ? Outcome::A1 : Outcome::NoAccident));
  }
  const CampaignSummary s = aggregate(runs, results);
  const RowSummary * r = s.find(RunGroup::Matrix, "driver", "rd");
  REQUIRE(r != nullptr);
  CHECK(r->a1_rate == doctest::Approx(49.1667).epsilon(1e-4));
  CHECK(r->a2_rate == 0.0);
  CHECK(r->prevented_rate == doctest::Approx(50.8333).epsilon(1e-4));
  CHECK(r->a1_rate + r->a2_rate + r->prevented_rate == doctest::Approx(100.0));
  CHECK(r->trigger_rate[0] == 0.0);
  CHECK(std::isnan(r->mitigation_time[0]));
}

TEST_CASE("aggregate unanimity, invalid runs and errors")
{
  std::vector<CampaignRun> runs;
  std::vector<RunResult> results;
  for (std::size_t i = 0; i < 10; ++i) {
    runs.push_back(matrix_run(i, FaultKind::DesiredCurvature));
    results.push_back(outcome(i == 9 ? Outcome::Invalid : Outcome::NoAccident));
  }
  const CampaignSummary s = aggregate(runs, results);
  const RowSummary * r = s.find(RunGroup::Matrix, "driver", "curvature");
  REQUIRE(r != nullptr);
  CHECK(r->prevented_rate == 100.0);
  CHECK(r->invalid == 1);
  CHECK(s.invalid_runs == 1);

  std::vector<RunResult> bad(10, outcome(Outcome::Invalid));
  CHECK_THROWS_AS(aggregate(runs, bad), ConfigError);
}

TEST_CASE("aggregate is permutation invariant")
{
  std::vector<CampaignRun> runs;
  std::vector<RunResult> results;
  std::mt19937_64 rng(3);
  const FaultKind faults[] = {FaultKind::RelativeDistance, FaultKind::DesiredCurvature};
  for (std::size_t i = 0; i < 200; ++i) {
    runs.push_back(matrix_run(i, faults[i % 2], i < 100 ? "driver" : "aeb-indep"));
    RunResult r = outcome(static_cast<Outcome>(rng() % 3));
    r.triggers[1].fired = rng() % 2 == 0;
    if (r.triggers[1].fired) r.triggers[1].mitigation_time = 0.1 * static_cast<double>(rng() % 97);
    results.push_back(r);
  }
  const CampaignSummary a = aggregate(runs, results);
  std::vector<std::size_t> perm(runs.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<CampaignRun> runs2;
  std::vector<RunResult> results2;
  for (std::size_t i : perm) {
    runs2.push_back(runs[i]);
    results2.push_back(results[i]);
  }
  const CampaignSummary b = aggregate(runs2, results2);
  CHECK(a == b);
  CHECK(summary_csv(a) == summary_csv(b));
}

TEST_CASE("summary CSV round trip and markdown rows")
{
  CampaignConfig c = one_row("aeb-indep");
  c.rows.push_back(InterventionConfig::parse("driver,safety-check"));
  c.fault_free = true;
  c.scenarios = {ScenarioId::S1, ScenarioId::S4};
  c.init_gaps = {60.0};
  c.repetitions = 2;
  c.t_react_sweep = {1.0, 3.0};
  c.t_react_row = InterventionConfig::parse("driver");
  c.threads = 1;
  const CampaignOutput o = execute_campaign(c);
  const CampaignSummary back = parse_summary(summary_csv(o.summary), fault_free_csv(o.summary));
  CHECK(back == o.summary);

  const std::string md = render_markdown(o.summary);
  CHECK(md.find("| all | aeb-indep |") != std::string::npos);
  CHECK(md.find("| all | driver,safety-check |") != std::string::npos);
  CHECK(md.find("| S1 | 0/2 |") != std::string::npos);
  CHECK(md.find("Driver reaction time") != std::string::npos);
}

TEST_CASE("run_campaign results do not depend on worker count")
{
  CampaignConfig c = one_row("driver,aeb-comp");
  c.scenarios = {ScenarioId::S2, ScenarioId::S5};
  c.repetitions = 2;
  const auto runs = expand_grid(c);
  const auto one = run_campaign(runs, 1);
  const auto three = run_campaign(runs, 3);
  CHECK(summary_csv(aggregate(runs, one)) == summary_csv(aggregate(runs, three)));
}

TEST_CASE("time series and event CSV round trip")
{
  RunSpec s;
  s.seed = 4;
  s.scenario = builtin_scenario(ScenarioId::S4, 60.0);
  s.fault.kind = FaultKind::Mixed;
  s.interventions = InterventionConfig::parse("driver,aeb-indep");
  const RunLog log = simulate(s);
  const auto dir = std::filesystem::temp_directory_path() / "adas_sim_csv_test";
  std::filesystem::create_directories(dir);
  write_timeseries_csv((dir / "ts.csv").string(), log.records);
  write_events_csv((dir / "ev.csv").string(), log.events);
  const auto records = read_timeseries_csv((dir / "ts.csv").string());
  const auto events = read_events_csv((dir / "ev.csv").string());
  REQUIRE(records.size() == log.records.size());
  REQUIRE(events.size() == log.events.size());
  const Trace a = trace_from_records(log.records);
  const Trace b = trace_from_records(records);
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(TraceSample)) == 0);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].signal == log.events[i].signal);
    CHECK(events[i].t == log.events[i].t);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(read_events_csv((dir / "ev.csv").string()), IoError);
  CHECK_THROWS_AS(write_text_file("/nonexistent-dir/x.csv", "x"), IoError);
}

TEST_CASE("scenario files reproduce the built-in scenarios")
{
  for (ScenarioId id : kAllScenarios) {
    const std::string name = to_string(id);
    std::string lower = name;
    lower[0] = 's';
    const ScenarioSpec file = load_scenario_file(std::string(ADAS_SIM_SOURCE_DIR) + "/scenarios/" + lower + ".toml");
    RunSpec a;
    a.seed = 17;
    a.scenario = builtin_scenario(id, 60.0);
    a.fault.kind = FaultKind::Mixed;
    RunSpec b = a;
    b.scenario = file;
    const RunLog la = simulate(a);
    const RunLog lb = simulate(b);
    CHECK_MESSAGE(la.records.size() == lb.records.size(), name);
    CHECK_MESSAGE(la.records.back().x == lb.records.back().x, name);
    CHECK_MESSAGE(la.records.back().speed == lb.records.back().speed, name);
  }
}

TEST_CASE("scenario TOML errors")
{
  CHECK_THROWS_AS(parse_scenario("[scenario]\nid = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[scenario\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\n[[lead_profile]]\nvehicle = 7\ntrigger_time = 1.0\n"),
                  ConfigError);
  const ScenarioSpec s = parse_scenario("[scenario]\nbase = \"S4\"\ninit_gap = 230.0\nfriction = 0.5\n");
  CHECK(s.init_gap == 230.0);
  CHECK(s.friction == 0.5);
  CHECK(s.lead_profile.size() == 1);
  CHECK_THROWS_AS(load_scenario_file("/nonexistent/s.toml"), IoError);
}

TEST_CASE("campaign TOML")
{
  const CampaignConfig c = parse_campaign(R"(
[campaign]
seed = 7
repetitions = 2
scenarios = ["S1", "S4"]
[fault]
kinds = ["rd"]
patch_jitter = 0.0
[interventions]
rows = ["driver,aeb-indep"]
t_react_sweep = []
friction_sweep = [0.5]
[ml]
b0 = [0.1, 0.001]
tau = [1.0, 0.01]
)");
  CHECK(c.base_seed == 7);
  CHECK(c.repetitions == 2);
  CHECK(c.scenarios.size() == 2);
  CHECK(c.faults == std::vector<FaultKind>{FaultKind::RelativeDistance});
  CHECK(c.rows.size() == 1);
  CHECK(c.t_react_sweep.empty());
  CHECK(c.ml_b0.has_value());
  CHECK(expand_grid(c).size() == 8 + 8 + 8);

  CHECK_THROWS_AS(parse_campaign("[campaign]\nrepetitions = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign("[acc]\nheadway = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign("[wat]\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign("[interventions]\nrows = [\"warp\"]\n"), ConfigError);
  CHECK_THROWS_AS(parse_campaign("[ml]\nb0 = [1.0]\n"), ConfigError);
  CHECK_THROWS_AS(load_campaign_file("/nonexistent/c.toml"), IoError);
  CHECK_NOTHROW(load_campaign_file(std::string(ADAS_SIM_SOURCE_DIR) + "/configs/campaign.toml"));
}
