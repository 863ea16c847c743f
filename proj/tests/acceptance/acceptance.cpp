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

// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "adas_sim/campaign.hpp"
#include "adas_sim/report.hpp"
#include "adas_sim/safety.hpp"

using namespace adas_sim;
using Clock = std::chrono::steady_clock;

namespace
{

int failures = 0;

void verdict(int n, bool ok, const std::string & detail)
{
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char * f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0)
{
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void criterion_1()
{
  const auto t0 = Clock::now();
  bool ok = true;
  double worst = 0.0;
  for (double v : {5.0, 13.411, 22.352, 30.0}) {
    const AebsThresholds t = aebs_thresholds(v, 4.5, 2.5);
    const double hand[4] = {2.5 + v / 4.5, v / 3.8, v / 5.8, v / 9.8};
    const double got[4] = {t.t_fcw, t.t_pb1, t.t_pb2, t.t_fb};
    const AebStage inner[4] = {AebStage::FcwAlert, AebStage::Brake90, AebStage::Brake95,
                               AebStage::Brake100};
    const AebStage outer[4] = {AebStage::Inactive, AebStage::FcwAlert, AebStage::Brake90,
                               AebStage::Brake95};
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(got[i] - hand[i]));
      ok = ok && std::abs(got[i] - hand[i]) <= 1e-9;
      ok = ok && stage_for_ttc(hand[i] - 1e-9, t) == inner[i];
      ok = ok && stage_for_ttc(hand[i] + 1e-9, t) == outer[i];
    }
  }
  const double dt = seconds_since(t0);
  ok = ok && dt < 1.0;
  verdict(1, ok, fmt("AEBS thresholds: max |error| %.3g s, stage boundaries checked at +-1e-9 s, %.3f s", worst, dt));
}

void criterion_3()
{
  // Independent scalar recursion against cusum_step on synthetic deltas.
  bool ok = true;
  long triggers = 0;
  long exits = 0;
  std::mt19937_64 rng(2024);
  for (int seq = 0; seq < 20 && ok; ++seq) {
    const double b = 0.02 + 0.01 * seq;
    const double tau = 10.0 * b;
    CusumState st;
    st.b = b;
    st.tau = tau;
    double S = 0.0;
    bool rec = false;
    for (int k = 0; k < 10000; ++k) {
      const double u = unit_uniform(rng);
      // Quiet stretches with bursts that push the sum over tau.
      const double delta = (k / 500) % 3 == 2 ? 3.0 * b * u + b : 1.2 * b * u;
      // Reference: Alg. 1 written out directly.
      S = std::max(0.0, S + delta - b);
      bool entered = false;
      bool exited = false;
      if (!rec && S > tau) {
        rec = true;
        entered = true;
      }
      double y = 0.0;
      if (rec) {
        y = delta;
        if (delta <= b) {
          rec = false;
          S = 0.0;
          exited = true;
        }
      }
      const CusumResult r = cusum_step(st, delta, 0.0);
      st = r.state;
      ok = ok && r.state.S == S && r.entered == entered && r.exited == exited &&
           r.state.recovery_mode == rec && r.y == y && r.state.S >= 0.0;
      triggers += entered;
      exits += exited;
    }
  }
  verdict(3, ok && triggers > 0 && exits > 0,
          fmt("CUSUM replay over 20 x 10,000 steps: %.0f recovery entries, %.0f exits, bit-exact", triggers, exits));
}

double prevented(const CampaignSummary & s, RunGroup g, const std::string & row, const std::string & fault,
                 double sweep = std::numeric_limits<double>::quiet_NaN())
{
  const RowSummary * r = s.find(g, row, fault, sweep);
  return r != nullptr ? r->prevented_rate : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

int main()
{
  criterion_1();

  std::printf("running the paper campaign...\n");
  std::fflush(stdout);
  const auto t0 = Clock::now();
  CampaignConfig config = CampaignConfig::paper_default();
  const CampaignOutput out = execute_campaign(config);
  const CampaignSummary & s = out.summary;
  std::printf("  %zu runs in %.1f s, %d invalid\n", out.runs.size(), seconds_since(t0), s.invalid_runs);

  // 2: software longitudinal commands stay inside the clamp on every SC row;
  // AEB still brakes harder than the clamp allows.
  {
    bool ok = true;
    double lo = kInfinity;
    double hi = -kInfinity;
    double deepest = 0.0;
    int rows = 0;
    for (const auto & row : config.rows) {
      if (!row.safety_check) continue;
      ++rows;
      for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const CampaignRun & c = out.runs[i];
        if (c.group != RunGroup::Matrix || c.row != row.name) continue;
        const RunResult & r = out.results[i];
        if (r.outcome == Outcome::Invalid) continue;
        lo = std::min(lo, r.sw_accel_min);
        hi = std::max(hi, r.sw_accel_max);
        deepest = std::max(deepest, r.brake100_decel);
      }
    }
    ok = rows > 0 && lo >= -3.5 && hi <= 2.0 && deepest > 3.5;
    verdict(2, ok, fmt("%.0f safety-check rows x 360 runs: ADAS/ML accel in [%.3f, %.3f], deepest Brake100 decel %.2f m/s^2",
                       rows, lo, hi, deepest));
  }

  criterion_3();

  // 4: fault-free baseline.
  {
    bool ok = true;
    std::string detail;
    for (const auto & f : s.fault_free) {
      const int valid = f.runs - f.invalid;
      if (f.scenario == "S1" || f.scenario == "S2" || f.scenario == "S6") {
        ok = ok && valid == 20 && f.accidents == 0;
      }
      if (f.scenario == "S4") {
        int hazardous = 0;
        for (std::size_t i = 0; i < out.runs.size(); ++i) {
          const CampaignRun & c = out.runs[i];
          if (c.group != RunGroup::FaultFree || c.spec.scenario.id != "S4") continue;
          const RunResult & r = out.results[i];
          hazardous += (r.outcome == Outcome::A1 || r.outcome == Outcome::A2 || r.h1_count > 0) ? 1 : 0;
        }
        ok = ok && valid == 20 && hazardous >= 1;
        detail += fmt("S4 accident-or-H1 %.0f/20 (min TTC %.2f s); ", hazardous, f.min_ttc);
      }
      detail += f.scenario + " " + std::to_string(f.accidents) + "/" + std::to_string(valid) + " accidents; ";
    }
    verdict(4, ok, detail);
  }

  // 5: no-intervention severity.
  {
    const RowSummary * rd = s.find(RunGroup::Matrix, "none", "rd");
    const RowSummary * cv = s.find(RunGroup::Matrix, "none", "curvature");
    const bool ok = rd != nullptr && cv != nullptr && rd->a1 + rd->a2 == rd->valid && rd->valid == 120 &&
                    cv->a2_rate >= 95.0;
    verdict(5, ok, fmt("RD accidents %.2f%% of runs, curvature A2 %.2f%%",
                       rd ? rd->a1_rate + rd->a2_rate : NAN, cv ? cv->a2_rate : NAN));
  }

  // 6: independent AEB against compromised AEB under RD faults.
  {
    const RowSummary * ind = s.find(RunGroup::Matrix, "aeb-indep", "rd");
    const RowSummary * cmp = s.find(RunGroup::Matrix, "aeb-comp", "rd");
    const bool ok = ind != nullptr && cmp != nullptr && ind->prevented_rate == 100.0 &&
                    ind->trigger_rate[0] == 100.0 &&
                    cmp->prevented_rate <= ind->prevented_rate - 30.0;
    verdict(6, ok, fmt("AEB-indep prevented %.2f%% (trigger %.2f%%), AEB-comp prevented %.2f%%",
                       ind ? ind->prevented_rate : NAN, ind ? ind->trigger_rate[0] : NAN,
                       cmp ? cmp->prevented_rate : NAN));
  }

  // 7: reaction-time monotonicity, driver only, curvature faults.
  {
    std::vector<double> rates;
    for (double t : config.t_react_sweep) {
      rates.push_back(prevented(s, RunGroup::ReactionSweep, config.t_react_row.name, "curvature", t));
    }
    bool ok = rates.size() == 6;
    std::string detail = "prevention";
    for (std::size_t i = 0; i < rates.size(); ++i) {
      detail += fmt(" %.2f%%", rates[i]);
      if (i > 0) ok = ok && rates[i] <= rates[i - 1] + 5.0;
    }
    ok = ok && rates.front() - rates.back() >= 15.0;
    verdict(7, ok, detail + " at T_react 1.0..3.5 s");
  }

  // 8: friction degradation, curvature faults.
  {
    const double hi = prevented(s, RunGroup::FrictionSweep, config.friction_row.name, "curvature", 1.0);
    const double lo = prevented(s, RunGroup::FrictionSweep, config.friction_row.name, "curvature", 0.25);
    verdict(8, lo <= hi - 15.0,
            fmt("prevention %.2f%% at mu 1.0, %.2f%% at mu 0.25, row ", hi, lo) + config.friction_row.name);
  }

  // 9: ML mitigation closed loop.
  {
    const RowSummary * rd = s.find(RunGroup::Matrix, "ml", "rd");
    const RowSummary * all = s.find(RunGroup::Matrix, "ml", "all");
    const RowSummary * ind = s.find(RunGroup::Matrix, "aeb-indep", "rd");
    const bool a1_ok = rd != nullptr && rd->a1_rate <= 5.0;
    const bool order_ok = all != nullptr && ind != nullptr && all->prevented_rate < ind->prevented_rate;
    verdict(9, a1_ok && order_ok,
            fmt("ML row: RD A1 %.2f%%, RD prevented %.2f%%, overall prevented %.2f%% vs AEB-indep %.2f%%",
                rd ? rd->a1_rate : NAN, rd ? rd->prevented_rate : NAN,
                all ? all->prevented_rate : NAN, ind ? ind->prevented_rate : NAN));
  }

  // 10: determinism and scale on a 360-run campaign.
  {
    CampaignConfig c;
    c.fault_free = false;
    c.rows = {InterventionConfig::parse("driver,safety-check,aeb-comp")};
    const auto t1 = Clock::now();
    const std::string a = summary_csv(execute_campaign(c).summary);
    const double dt = seconds_since(t1);
    const std::string b = summary_csv(execute_campaign(c).summary);
    verdict(10, a == b && dt <= 300.0,
            fmt("360-run campaign in %.1f s; repeated summary CSV byte-identical: ", dt) +
              (a == b ? "yes" : "no"));
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
