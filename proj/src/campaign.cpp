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

#include "adas_sim/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

namespace adas_sim
{

std::string to_string(RunGroup group)
{
  switch (group) {
    case RunGroup::FaultFree: return "fault_free";
    case RunGroup::Matrix: return "matrix";
    case RunGroup::ReactionSweep: return "t_react_sweep";
    case RunGroup::FrictionSweep: return "friction_sweep";
  }
  return "matrix";
}

RunGroup run_group_from_string(const std::string & name)
{
  if (name == "fault_free") return RunGroup::FaultFree;
  if (name == "matrix") return RunGroup::Matrix;
  if (name == "t_react_sweep") return RunGroup::ReactionSweep;
  if (name == "friction_sweep") return RunGroup::FrictionSweep;
  throw ConfigError("unknown run group '" + name + "'");
}

CampaignConfig CampaignConfig::paper_default()
{
  CampaignConfig c;
  for (const char * row : {"none", "driver,safety-check", "driver,safety-check,aeb-comp",
                           "driver,safety-check,aeb-indep", "aeb-comp", "aeb-indep", "driver",
                           "ml"}) {
    c.rows.push_back(InterventionConfig::parse(row));
  }
  c.t_react_sweep = {1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
  c.t_react_row = InterventionConfig::parse("driver");
  c.friction_sweep = {1.0, 0.75, 0.5, 0.25};
  c.friction_row = InterventionConfig::parse("driver,safety-check,aeb-comp");
  return c;
}

bool CampaignConfig::uses_ml() const
{
  const bool rows_ml = std::any_of(rows.begin(), rows.end(),
                                   [](const InterventionConfig & r) { return r.ml; });
  return rows_ml || (!t_react_sweep.empty() && t_react_row.ml) ||
         (!friction_sweep.empty() && friction_row.ml);
}

void CampaignConfig::validate() const
{
  if (init_gaps.empty()) throw ConfigError("campaign: init_gaps is empty");
  if (scenarios.empty()) throw ConfigError("campaign: scenarios is empty");
  if (repetitions < 1) throw ConfigError("campaign: repetitions must be >= 1");
  if (!fault_free && rows.empty() && t_react_sweep.empty() && friction_sweep.empty()) {
    throw ConfigError("campaign: nothing to run");
  }
  if ((!rows.empty() || !t_react_sweep.empty() || !friction_sweep.empty()) && faults.empty()) {
    throw ConfigError("campaign: faults is empty");
  }
  for (FaultKind f : faults) {
    if (f == FaultKind::None) throw ConfigError("campaign: 'none' is covered by the fault-free block");
  }
  for (double g : init_gaps) {
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("campaign: init_gap must be positive");
  }
  for (double t : t_react_sweep) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("campaign: T_react must be >= 0");
  }
  for (double mu : friction_sweep) {
    if (!(mu > 0.0) || mu > 1.0) throw ConfigError("campaign: friction must lie in (0, 1]");
  }
  if (!(patch_jitter >= 0.0)) throw ConfigError("campaign: patch_jitter must be >= 0");
  if (timeseries_reps < 0) throw ConfigError("campaign: timeseries_reps must be >= 0");
  if (threads < 0) throw ConfigError("campaign: threads must be >= 0");
  if (uses_ml() && model_path.empty() && !fault_free) {
    throw ConfigError("campaign: ML rows need [ml].model or the fault-free block for training");
  }
  fault.validate();
  acc.validate();
  alc.validate();
  driver.validate();
  for (const auto & r : rows) r.validate();
}

std::uint64_t fnv1a(const std::string & text)
{
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t run_seed(std::uint64_t base_seed, FaultKind fault, double init_gap,
                       const std::string & scenario, int rep)
{
  std::ostringstream key;
  key << to_string(fault) << '|' << init_gap << '|' << scenario << '|' << rep;
  return base_seed + fnv1a(key.str());
}

std::vector<CampaignRun> expand_grid(const CampaignConfig & config)
{
  config.validate();
  std::vector<CampaignRun> out;

  auto block = [&](RunGroup group, const InterventionConfig & iv, FaultKind fault,
                   std::optional<double> t_react, std::optional<double> friction) {
    for (ScenarioId sid : config.scenarios) {
      for (double gap : config.init_gaps) {
        for (int rep = 0; rep < config.repetitions; ++rep) {
          CampaignRun run;
          run.group = group;
          run.row = iv.name;
          if (t_react) run.sweep_value = *t_react;
          if (friction) run.sweep_value = *friction;
          run.write_timeseries = group == RunGroup::FaultFree && rep < config.timeseries_reps;
          RunSpec & s = run.spec;
          s.index = out.size();
          s.rep = rep;
          s.scenario = builtin_scenario(sid, gap, friction.value_or(1.0));
          s.seed = run_seed(config.base_seed, fault, gap, s.scenario.id, rep);
          s.fault = config.fault;
          s.fault.kind = fault;
          s.patch_jitter = config.patch_jitter;
          s.interventions = iv;
          if (t_react) s.interventions.driver_t_react = *t_react;
          s.acc = config.acc;
          s.alc = config.alc;
          s.sensors = config.sensors;
          s.driver = config.driver;
          s.a_driver = config.a_driver;
          s.aeb_t_react = config.aeb_t_react;
          s.hazards = config.hazards;
          s.ml.b0 = config.ml_b0;
          s.ml.tau = config.ml_tau;
          out.push_back(std::move(run));
        }
      }
    }
  };

  if (config.fault_free) {
    block(RunGroup::FaultFree, InterventionConfig::parse("none"), FaultKind::None, std::nullopt,
          std::nullopt);
  }
  for (const auto & row : config.rows) {
    for (FaultKind f : config.faults) block(RunGroup::Matrix, row, f, std::nullopt, std::nullopt);
  }
  for (double t : config.t_react_sweep) {
    for (FaultKind f : config.faults) {
      block(RunGroup::ReactionSweep, config.t_react_row, f, t, std::nullopt);
    }
  }
  for (double mu : config.friction_sweep) {
    for (FaultKind f : config.faults) {
      block(RunGroup::FrictionSweep, config.friction_row, f, std::nullopt, mu);
    }
  }
  return out;
}

int worker_count(int configured)
{
  int n = configured > 0 ? configured : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  if (const char * env = std::getenv("SIM_THREADS"); env != nullptr && *env != '\0') {
    char * end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (*end != '\0' || cap < 1) throw ConfigError("SIM_THREADS must be a positive integer");
    n = std::min<long>(n, cap);
  }
  return n;
}

std::vector<RunResult> run_campaign(
  const std::vector<CampaignRun> & runs, int threads,
  const std::function<void(const CampaignRun &, const RunLog &)> & sink)
{
  std::vector<RunResult> results(runs.size());
  std::atomic<std::size_t> next{0};
  std::mutex lock;
  std::exception_ptr error;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= runs.size()) return;
      try {
        RunLog log = simulate(runs[i].spec);
        results[i] = finalize_metrics(log);
        if (sink) {
          std::lock_guard<std::mutex> g(lock);
          sink(runs[i], log);
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(lock);
        if (!error) error = std::current_exception();
        next = runs.size();
        return;
      }
    }
  };

  const int n = std::min<int>(worker_count(threads), static_cast<int>(std::max<std::size_t>(runs.size(), 1)));
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto & t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

namespace
{

bool same_value(double a, double b)
{
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

template <std::size_t N>
bool same_values(const std::array<double, N> & a, const std::array<double, N> & b)
{
  for (std::size_t i = 0; i < N; ++i) {
    if (!same_value(a[i], b[i])) return false;
  }
  return true;
}

double percent(int count, int total)
{
  return total > 0 ? 100.0 * count / total : std::numeric_limits<double>::quiet_NaN();
}

RowSummary summarize(const std::vector<const RunResult *> & results)
{
  RowSummary s;
  std::array<double, kTriggerCount> time_sum{};
  std::array<int, kTriggerCount> fired{};
  std::array<int, kTriggerCount> timed{};
  for (const RunResult * r : results) {
    ++s.runs;
    if (r->outcome == Outcome::Invalid) {
      ++s.invalid;
      continue;
    }
    ++s.valid;
    if (r->outcome == Outcome::A1) ++s.a1;
    if (r->outcome == Outcome::A2) ++s.a2;
    if (r->prevented()) ++s.prevented;
    for (std::size_t k = 0; k < kTriggerCount; ++k) {
      const TriggerRecord & t = r->triggers[k];
      if (!t.fired) continue;
      ++fired[k];
      if (!std::isnan(t.mitigation_time)) {
        time_sum[k] += t.mitigation_time;
        ++timed[k];
      }
    }
  }
  s.a1_rate = percent(s.a1, s.valid);
  s.a2_rate = percent(s.a2, s.valid);
  s.prevented_rate = percent(s.prevented, s.valid);
  for (std::size_t k = 0; k < kTriggerCount; ++k) {
    s.trigger_rate[k] = percent(fired[k], s.valid);
    s.mitigation_time[k] =
      timed[k] > 0 ? time_sum[k] / timed[k] : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace

bool RowSummary::operator==(const RowSummary & o) const
{
  return group == o.group && row == o.row && fault == o.fault &&
         same_value(sweep_value, o.sweep_value) && runs == o.runs && invalid == o.invalid &&
         valid == o.valid && a1 == o.a1 && a2 == o.a2 && prevented == o.prevented &&
         same_value(a1_rate, o.a1_rate) && same_value(a2_rate, o.a2_rate) &&
         same_value(prevented_rate, o.prevented_rate) &&
         same_values(mitigation_time, o.mitigation_time) &&
         same_values(trigger_rate, o.trigger_rate);
}

bool ScenarioSummary::operator==(const ScenarioSummary & o) const
{
  return scenario == o.scenario && runs == o.runs && invalid == o.invalid &&
         accidents == o.accidents && h1_runs == o.h1_runs && h2_runs == o.h2_runs &&
         same_value(hardest_brake, o.hardest_brake) && same_value(min_ttc, o.min_ttc) &&
         same_value(min_t_fcw, o.min_t_fcw) &&
         same_value(following_distance, o.following_distance) &&
         same_value(min_lane_distance, o.min_lane_distance);
}

const RowSummary * CampaignSummary::find(RunGroup group, const std::string & row,
                                         const std::string & fault, double sweep_value) const
{
  for (const auto & r : rows) {
    if (r.group == group && r.row == row && r.fault == fault &&
        same_value(r.sweep_value, sweep_value)) {
      return &r;
    }
  }
  return nullptr;
}

CampaignSummary aggregate(const std::vector<CampaignRun> & runs,
                          const std::vector<RunResult> & results)
{
  if (runs.size() != results.size()) throw HarnessFault("aggregate: runs/results size mismatch");

  // Canonical order by spec index makes every sum independent of input order.
  std::vector<std::size_t> order(runs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&runs](std::size_t a, std::size_t b) {
    return runs[a].spec.index < runs[b].spec.index;
  });

  CampaignSummary out;
  int valid = 0;
  for (const auto & r : results) {
    if (r.outcome == Outcome::Invalid) {
      ++out.invalid_runs;
    } else {
      ++valid;
    }
  }
  if (valid == 0) throw ConfigError("aggregate: no valid runs");

  // Table IV analogue.
  std::vector<std::string> scen_order;
  std::map<std::string, std::vector<const RunResult *>> by_scenario;
  for (std::size_t i : order) {
    if (runs[i].group != RunGroup::FaultFree) continue;
    const std::string & id = runs[i].spec.scenario.id;
    if (by_scenario.find(id) == by_scenario.end()) scen_order.push_back(id);
    by_scenario[id].push_back(&results[i]);
  }
  for (const auto & id : scen_order) {
    ScenarioSummary s;
    s.scenario = id;
    double follow_sum = 0.0;
    int follow_n = 0;
    for (const RunResult * r : by_scenario[id]) {
      ++s.runs;
      if (r->outcome == Outcome::Invalid) {
        ++s.invalid;
        continue;
      }
      if (r->outcome != Outcome::NoAccident) ++s.accidents;
      if (r->h1_count > 0) ++s.h1_runs;
      if (r->h2_count > 0) ++s.h2_runs;
      s.hardest_brake = std::max(s.hardest_brake, r->hardest_brake);
      s.min_ttc = std::min(s.min_ttc, r->min_ttc);
      s.min_t_fcw = std::min(s.min_t_fcw, r->min_t_fcw);
      s.min_lane_distance = std::min(s.min_lane_distance, r->min_lane_distance);
      if (std::isfinite(r->stable_following_distance)) {
        follow_sum += r->stable_following_distance;
        ++follow_n;
      }
    }
    if (follow_n > 0) s.following_distance = follow_sum / follow_n;
    out.fault_free.push_back(s);
  }

  // Table V/VI/VII analogues, keyed by (group, row, sweep value) in order of
  // first appearance.
  using Key = std::tuple<RunGroup, std::string, double>;
  std::vector<Key> keys;
  auto same_key = [](const Key & a, const Key & b) {
    return std::get<0>(a) == std::get<0>(b) && std::get<1>(a) == std::get<1>(b) &&
           same_value(std::get<2>(a), std::get<2>(b));
  };
  for (std::size_t i : order) {
    if (runs[i].group == RunGroup::FaultFree) continue;
    const Key k{runs[i].group, runs[i].row, runs[i].sweep_value};
    if (std::none_of(keys.begin(), keys.end(), [&](const Key & x) { return same_key(x, k); })) {
      keys.push_back(k);
    }
  }
  const FaultKind fault_order[] = {FaultKind::RelativeDistance, FaultKind::DesiredCurvature,
                                   FaultKind::Mixed};
  for (const Key & k : keys) {
    std::vector<const RunResult *> all;
    std::array<std::vector<const RunResult *>, 3> per_fault;
    for (std::size_t i : order) {
      if (runs[i].group == RunGroup::FaultFree) continue;
      if (!same_key(Key{runs[i].group, runs[i].row, runs[i].sweep_value}, k)) continue;
      all.push_back(&results[i]);
      for (std::size_t f = 0; f < 3; ++f) {
        if (runs[i].spec.fault.kind == fault_order[f]) per_fault[f].push_back(&results[i]);
      }
    }
    auto emit = [&](const std::vector<const RunResult *> & set, const std::string & fault) {
      RowSummary s = summarize(set);
      s.group = std::get<0>(k);
      s.row = std::get<1>(k);
      s.sweep_value = std::get<2>(k);
      s.fault = fault;
      out.rows.push_back(s);
    };
    for (std::size_t f = 0; f < 3; ++f) {
      if (!per_fault[f].empty()) emit(per_fault[f], to_string(fault_order[f]));
    }
    emit(all, "all");
  }
  return out;
}

}  // namespace adas_sim
