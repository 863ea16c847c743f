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

#ifndef ADAS_SIM__REPORT_HPP_
#define ADAS_SIM__REPORT_HPP_

#include <memory>
#include <string>
#include <vector>

#include "adas_sim/campaign.hpp"

namespace adas_sim
{

/// Shortest text that parses back to the same double: %.17g, "" for NaN,
/// "inf"/"-inf".
std::string format_number(double value);
/// Inverse of format_number. Throws ConfigError on malformed text.
double parse_number(const std::string & text);

/// Table V/VI/VII rows.
std::string summary_csv(const CampaignSummary & summary);
/// Table IV rows.
std::string fault_free_csv(const CampaignSummary & summary);
/// Inverse of the two emitters; invalid_runs is recovered from the "all" rows
/// and the fault-free table.
CampaignSummary parse_summary(const std::string & rows_csv, const std::string & fault_free_csv);

std::string render_markdown(const CampaignSummary & summary);

/// One line per run: identity, outcome and the RunResult metrics.
std::string runs_csv(const std::vector<CampaignRun> & runs, const std::vector<RunResult> & results);

void write_timeseries_csv(const std::string & path, const std::vector<StepRecord> & records);
std::vector<StepRecord> read_timeseries_csv(const std::string & path);

void write_events_csv(const std::string & path, const std::vector<LogEvent> & events);
std::vector<LogEvent> read_events_csv(const std::string & path);

/// Reads every *.csv time series in a directory, in name order.
std::vector<Trace> load_traces(const std::string & dir, double rd_cap = 150.0);

std::string read_text_file(const std::string & path);
/// Throws IoError naming the path on failure.
void write_text_file(const std::string & path, const std::string & text);

struct CampaignOutput
{
  std::vector<CampaignRun> runs;
  std::vector<RunResult> results;
  CampaignSummary summary;
  std::shared_ptr<const PiecewiseLinearPredictor> model;
};

/// Full campaign: fault-free block first, then (if ML rows exist and no model
/// path is set) predictor training on the fault-free time series, then every
/// remaining run. With a non-empty out_dir, writes
///   summary.csv, fault_free.csv, summary.md, runs.csv,
///   events/run_NNNNN.csv, faultfree/run_NNNNN.csv, model.txt (if trained).
CampaignOutput execute_campaign(const CampaignConfig & config, const std::string & out_dir = "");

}  // namespace adas_sim

#endif  // ADAS_SIM__REPORT_HPP_
