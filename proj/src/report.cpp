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

#include "adas_sim/report.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <variant>

namespace fs = std::filesystem;

namespace adas_sim
{

std::string format_number(double value)
{
  if (std::isnan(value)) return "";
  if (std::isinf(value)) return value > 0.0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

double parse_number(const std::string & text)
{
  if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
  char * end = nullptr;
  errno = 0;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw ConfigError("not a number: '" + text + "'");
  return v;
}

namespace
{

long parse_int(const std::string & text)
{
  char * end = nullptr;
  const long v = std::strtol(text.c_str(), &end, 10);
  if (text.empty() || *end != '\0') throw ConfigError("not an integer: '" + text + "'");
  return v;
}

std::string quote(const std::string & field)
{
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string & line)
{
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        in_quotes = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Header plus rows, each checked against the expected column list.
std::vector<std::vector<std::string>> parse_table(const std::string & text,
                                                  const std::vector<std::string> & header,
                                                  const std::string & what)
{
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || split_csv_line(line) != header) {
    throw ConfigError(what + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ConfigError(what + ": wrong field count");
    rows.push_back(std::move(f));
  }
  return rows;
}

void join(std::ostream & os, const std::vector<std::string> & fields)
{
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) os << ',';
    os << quote(fields[i]);
  }
  os << '\n';
}

constexpr Trigger kTriggers[] = {Trigger::Aeb, Trigger::DriverBrake, Trigger::DriverSteer,
                                 Trigger::Ml, Trigger::SafetyCheck};

std::vector<std::string> summary_header()
{
  std::vector<std::string> h = {"group", "row", "fault", "sweep_value", "runs", "invalid",
                                "valid", "a1", "a2", "prevented", "a1_rate", "a2_rate",
                                "prevented_rate"};
  for (Trigger t : kTriggers) h.push_back("mitigation_time_" + to_string(t));
  for (Trigger t : kTriggers) h.push_back("trigger_rate_" + to_string(t));
  return h;
}

const std::vector<std::string> kFaultFreeHeader = {
  "scenario", "runs", "invalid", "accidents", "h1_runs", "h2_runs", "hardest_brake", "min_ttc",
  "min_t_fcw", "following_distance", "min_lane_distance"};

}  // namespace

std::string summary_csv(const CampaignSummary & summary)
{
  std::ostringstream os;
  join(os, summary_header());
  for (const auto & r : summary.rows) {
    std::vector<std::string> f = {to_string(r.group),
                                  r.row,
                                  r.fault,
                                  format_number(r.sweep_value),
                                  std::to_string(r.runs),
                                  std::to_string(r.invalid),
                                  std::to_string(r.valid),
                                  std::to_string(r.a1),
                                  std::to_string(r.a2),
                                  std::to_string(r.prevented),
                                  format_number(r.a1_rate),
                                  format_number(r.a2_rate),
                                  format_number(r.prevented_rate)};
    for (double v : r.mitigation_time) f.push_back(format_number(v));
    for (double v : r.trigger_rate) f.push_back(format_number(v));
    join(os, f);
  }
  return os.str();
}

std::string fault_free_csv(const CampaignSummary & summary)
{
  std::ostringstream os;
  join(os, kFaultFreeHeader);
  for (const auto & s : summary.fault_free) {
    join(os, {s.scenario, std::to_string(s.runs), std::to_string(s.invalid),
              std::to_string(s.accidents), std::to_string(s.h1_runs), std::to_string(s.h2_runs),
              format_number(s.hardest_brake), format_number(s.min_ttc),
              format_number(s.min_t_fcw), format_number(s.following_distance),
              format_number(s.min_lane_distance)});
  }
  return os.str();
}

CampaignSummary parse_summary(const std::string & rows_csv, const std::string & ff_csv)
{
  CampaignSummary out;
  for (const auto & f : parse_table(rows_csv, summary_header(), "summary.csv")) {
    RowSummary r;
    r.group = run_group_from_string(f[0]);
    r.row = f[1];
    r.fault = f[2];
    r.sweep_value = parse_number(f[3]);
    r.runs = static_cast<int>(parse_int(f[4]));
    r.invalid = static_cast<int>(parse_int(f[5]));
    r.valid = static_cast<int>(parse_int(f[6]));
    r.a1 = static_cast<int>(parse_int(f[7]));
    r.a2 = static_cast<int>(parse_int(f[8]));
    r.prevented = static_cast<int>(parse_int(f[9]));
    r.a1_rate = parse_number(f[10]);
    r.a2_rate = parse_number(f[11]);
    r.prevented_rate = parse_number(f[12]);
    for (std::size_t k = 0; k < kTriggerCount; ++k) {
      r.mitigation_time[k] = parse_number(f[13 + k]);
      r.trigger_rate[k] = parse_number(f[13 + kTriggerCount + k]);
    }
    if (r.fault == "all") out.invalid_runs += r.invalid;
    out.rows.push_back(r);
  }
  for (const auto & f : parse_table(ff_csv, kFaultFreeHeader, "fault_free.csv")) {
    ScenarioSummary s;
    s.scenario = f[0];
    s.runs = static_cast<int>(parse_int(f[1]));
    s.invalid = static_cast<int>(parse_int(f[2]));
    s.accidents = static_cast<int>(parse_int(f[3]));
    s.h1_runs = static_cast<int>(parse_int(f[4]));
    s.h2_runs = static_cast<int>(parse_int(f[5]));
    s.hardest_brake = parse_number(f[6]);
    s.min_ttc = parse_number(f[7]);
    s.min_t_fcw = parse_number(f[8]);
    s.following_distance = parse_number(f[9]);
    s.min_lane_distance = parse_number(f[10]);
    out.invalid_runs += s.invalid;
    out.fault_free.push_back(s);
  }
  return out;
}

namespace
{

std::string pct(double v)
{
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", v);
  return buf;
}

std::string fixed(double v, int digits = 2)
{
  if (std::isnan(v)) return "-";
  if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

void md_row(std::ostream & os, const std::vector<std::string> & cells)
{
  os << '|';
  for (const auto & c : cells) os << ' ' << c << " |";
  os << '\n';
}

void md_header(std::ostream & os, const std::vector<std::string> & cells)
{
  md_row(os, cells);
  os << '|';
  for (std::size_t i = 0; i < cells.size(); ++i) os << " --- |";
  os << '\n';
}

void sweep_table(std::ostream & os, const CampaignSummary & s, RunGroup group,
                 const std::string & title, const std::string & unit)
{
  std::vector<double> values;
  std::vector<std::string> faults;
  std::string row;
  for (const auto & r : s.rows) {
    if (r.group != group) continue;
    row = r.row;
    if (std::find(values.begin(), values.end(), r.sweep_value) == values.end()) {
      values.push_back(r.sweep_value);
    }
    if (std::find(faults.begin(), faults.end(), r.fault) == faults.end()) {
      faults.push_back(r.fault);
    }
  }
  if (values.empty()) return;
  os << "\n## " << title << "\n\nPrevention rate, interventions: " << row << "\n\n";
  std::vector<std::string> head{"Fault"};
  for (double v : values) head.push_back(fixed(v) + unit);
  md_header(os, head);
  for (const auto & f : faults) {
    std::vector<std::string> cells{f};
    for (double v : values) {
      const RowSummary * r = s.find(group, row, f, v);
      cells.push_back(r != nullptr ? pct(r->prevented_rate) : "-");
    }
    md_row(os, cells);
  }
}

}  // namespace

std::string render_markdown(const CampaignSummary & s)
{
  std::ostringstream os;
  os << "# Campaign summary\n";
  if (!s.fault_free.empty()) {
    os << "\n## Fault-free baseline\n\n";
    md_header(os, {"Scenario", "Accidents", "H1 runs", "H2 runs", "Hardest brake",
                   "Min TTC (s)", "Min t_fcw (s)", "Following distance (m)",
                   "Min lane distance (m)"});
    for (const auto & f : s.fault_free) {
      md_row(os, {f.scenario, std::to_string(f.accidents) + "/" + std::to_string(f.runs - f.invalid),
                  std::to_string(f.h1_runs), std::to_string(f.h2_runs), fixed(f.hardest_brake),
                  fixed(f.min_ttc), fixed(f.min_t_fcw), fixed(f.following_distance),
                  fixed(f.min_lane_distance)});
    }
  }
  bool any_matrix = false;
  for (const auto & r : s.rows) any_matrix = any_matrix || r.group == RunGroup::Matrix;
  if (any_matrix) {
    os << "\n## Fault injection with and without safety interventions\n\n";
    md_header(os, {"Fault", "Interventions", "Runs", "A1", "A2", "Prevented", "MT AEB (s)",
                   "MT driver brake (s)", "MT driver steer (s)", "MT ML (s)", "TR AEB",
                   "TR driver brake", "TR driver steer", "TR ML", "TR safety check"});
    for (const auto & r : s.rows) {
      if (r.group != RunGroup::Matrix) continue;
      md_row(os, {r.fault, r.row, std::to_string(r.valid), pct(r.a1_rate), pct(r.a2_rate),
                  pct(r.prevented_rate), fixed(r.mitigation_time[0]), fixed(r.mitigation_time[1]),
                  fixed(r.mitigation_time[2]), fixed(r.mitigation_time[3]),
                  pct(r.trigger_rate[0]), pct(r.trigger_rate[1]), pct(r.trigger_rate[2]),
                  pct(r.trigger_rate[3]), pct(r.trigger_rate[4])});
    }
  }
  sweep_table(os, s, RunGroup::ReactionSweep, "Driver reaction time", " s");
  sweep_table(os, s, RunGroup::FrictionSweep, "Road friction", "");
  os << "\nInvalid runs excluded: " << s.invalid_runs << '\n';
  return os.str();
}

std::string runs_csv(const std::vector<CampaignRun> & runs, const std::vector<RunResult> & results)
{
  std::ostringstream os;
  std::vector<std::string> head = {
    "index", "group", "row", "sweep_value", "scenario", "fault", "init_gap", "friction", "rep",
    "seed", "t_react", "outcome", "steps", "end_time", "fault_activation", "min_ttc", "min_t_fcw",
    "hardest_brake", "following_distance", "min_lane_distance", "h1_count", "h2_count",
    "sw_accel_min", "sw_accel_max", "brake100_decel"};
  for (Trigger t : kTriggers) {
    head.push_back("fired_" + to_string(t));
    head.push_back("mitigation_time_" + to_string(t));
  }
  head.push_back("invalid_reason");
  join(os, head);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const CampaignRun & c = runs[i];
    const RunResult & r = results[i];
    std::vector<std::string> f = {std::to_string(c.spec.index),
                                  to_string(c.group),
                                  c.row,
                                  format_number(c.sweep_value),
                                  c.spec.scenario.id,
                                  to_string(c.spec.fault.kind),
                                  format_number(c.spec.scenario.init_gap),
                                  format_number(c.spec.scenario.friction),
                                  std::to_string(c.spec.rep),
                                  std::to_string(c.spec.seed),
                                  format_number(c.spec.interventions.driver_t_react),
                                  to_string(r.outcome),
                                  std::to_string(r.steps),
                                  format_number(r.end_time),
                                  format_number(r.fault_activation),
                                  format_number(r.min_ttc),
                                  format_number(r.min_t_fcw),
                                  format_number(r.hardest_brake),
                                  format_number(r.stable_following_distance),
                                  format_number(r.min_lane_distance),
                                  std::to_string(r.h1_count),
                                  std::to_string(r.h2_count),
                                  format_number(r.sw_accel_min),
                                  format_number(r.sw_accel_max),
                                  format_number(r.brake100_decel)};
    for (Trigger t : kTriggers) {
      f.push_back(r.trigger(t).fired ? "1" : "0");
      f.push_back(format_number(r.trigger(t).mitigation_time));
    }
    f.push_back(r.invalid_reason);
    join(os, f);
  }
  return os.str();
}

namespace
{

using Member = std::variant<std::int64_t StepRecord::*, double StepRecord::*, int StepRecord::*>;

const std::vector<std::pair<std::string, Member>> & step_columns()
{
  static const std::vector<std::pair<std::string, Member>> cols = {
    {"step", &StepRecord::step},
    {"t", &StepRecord::t},
    {"x", &StepRecord::x},
    {"y", &StepRecord::y},
    {"s", &StepRecord::s},
    {"d", &StepRecord::d},
    {"speed", &StepRecord::speed},
    {"accel", &StepRecord::accel},
    {"curvature", &StepRecord::curvature},
    {"long_source", &StepRecord::long_source},
    {"lat_source", &StepRecord::lat_source},
    {"truth_rd", &StepRecord::truth_rd},
    {"truth_rs", &StepRecord::truth_rs},
    {"reported_rd", &StepRecord::reported_rd},
    {"reported_rs", &StepRecord::reported_rs},
    {"reported_curvature", &StepRecord::reported_curvature},
    {"indep_lead", &StepRecord::indep_lead},
    {"indep_rd", &StepRecord::indep_rd},
    {"indep_rs", &StepRecord::indep_rs},
    {"indep_curvature", &StepRecord::indep_curvature},
    {"lane_left", &StepRecord::lane_left},
    {"lane_right", &StepRecord::lane_right},
    {"heading_error", &StepRecord::heading_error},
    {"adas_accel", &StepRecord::adas_accel},
    {"adas_curvature", &StepRecord::adas_curvature},
    {"ml_accel", &StepRecord::ml_accel},
    {"ml_curvature", &StepRecord::ml_curvature},
    {"cusum_long", &StepRecord::cusum_long},
    {"cusum_lat", &StepRecord::cusum_lat},
    {"recovery", &StepRecord::recovery},
    {"aeb_stage", &StepRecord::aeb_stage},
    {"fcw", &StepRecord::fcw},
    {"driver_brake", &StepRecord::driver_brake},
    {"driver_steer", &StepRecord::driver_steer},
    {"fault", &StepRecord::fault},
    {"clamped", &StepRecord::clamped},
  };
  return cols;
}

std::ofstream open_out(const std::string & path)
{
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  return os;
}

}  // namespace

void write_timeseries_csv(const std::string & path, const std::vector<StepRecord> & records)
{
  std::ostringstream os;
  std::vector<std::string> head;
  for (const auto & [name, m] : step_columns()) head.push_back(name);
  join(os, head);
  for (const auto & r : records) {
    bool first = true;
    for (const auto & [name, m] : step_columns()) {
      if (!first) os << ',';
      first = false;
      std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(r.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            os << format_number(r.*member);
          } else {
            os << r.*member;
          }
        },
        m);
    }
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::vector<StepRecord> read_timeseries_csv(const std::string & path)
{
  std::vector<std::string> head;
  for (const auto & [name, m] : step_columns()) head.push_back(name);
  std::vector<StepRecord> out;
  for (const auto & f : parse_table(read_text_file(path), head, path)) {
    StepRecord r;
    for (std::size_t i = 0; i < head.size(); ++i) {
      std::visit(
        [&](auto member) {
          using T = std::remove_cvref_t<decltype(r.*member)>;
          if constexpr (std::is_same_v<T, double>) {
            r.*member = parse_number(f[i]);
          } else {
            r.*member = static_cast<T>(parse_int(f[i]));
          }
        },
        step_columns()[i].second);
    }
    out.push_back(r);
  }
  return out;
}

void write_events_csv(const std::string & path, const std::vector<LogEvent> & events)
{
  std::ostringstream os;
  join(os, {"step", "t", "signal", "source", "value"});
  for (const auto & e : events) {
    join(os, {std::to_string(e.step), format_number(e.t), e.signal, e.source,
              format_number(e.value)});
  }
  write_text_file(path, os.str());
}

std::vector<LogEvent> read_events_csv(const std::string & path)
{
  std::vector<LogEvent> out;
  for (const auto & f :
       parse_table(read_text_file(path), {"step", "t", "signal", "source", "value"}, path)) {
    out.push_back({parse_int(f[0]), parse_number(f[1]), f[2], f[3], parse_number(f[4])});
  }
  return out;
}

std::vector<Trace> load_traces(const std::string & dir, double rd_cap)
{
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto & entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list " + dir + ": " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<Trace> traces;
  for (const auto & p : files) traces.push_back(trace_from_records(read_timeseries_csv(p.string()), rd_cap));
  return traces;
}

std::string read_text_file(const std::string & path)
{
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) throw IoError("failed reading " + path);
  return ss.str();
}

void write_text_file(const std::string & path, const std::string & text)
{
  std::ofstream os = open_out(path);
  os << text;
  os.close();
  if (!os) throw IoError("failed writing " + path);
}

namespace
{

std::string run_file(const std::string & dir, std::size_t index)
{
  char name[32];
  std::snprintf(name, sizeof(name), "run_%05zu.csv", index);
  return (fs::path(dir) / name).string();
}

void make_dir(const fs::path & p)
{
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create directory " + p.string());
}

}  // namespace

CampaignOutput execute_campaign(const CampaignConfig & config, const std::string & out_dir)
{
  CampaignOutput out;
  out.runs = expand_grid(config);
  out.results.resize(out.runs.size());
  const bool write = !out_dir.empty();
  const fs::path root(out_dir);
  if (write) {
    make_dir(root / "events");
    make_dir(root / "faultfree");
  }

  std::map<std::size_t, Trace> traces;
  auto sink = [&](const CampaignRun & run, const RunLog & log) {
    if (write) write_events_csv(run_file((root / "events").string(), run.spec.index), log.events);
    if (!run.write_timeseries) return;
    if (write) {
      write_timeseries_csv(run_file((root / "faultfree").string(), run.spec.index), log.records);
    }
    traces[run.spec.index] = trace_from_records(log.records);
  };

  auto run_subset = [&](bool fault_free) {
    std::vector<CampaignRun> subset;
    for (const auto & r : out.runs) {
      if ((r.group == RunGroup::FaultFree) == fault_free) subset.push_back(r);
    }
    const auto res = run_campaign(subset, config.threads, sink);
    for (std::size_t i = 0; i < subset.size(); ++i) out.results[subset[i].spec.index] = res[i];
  };

  run_subset(true);

  if (config.uses_ml()) {
    if (!config.model_path.empty()) {
      out.model = std::make_shared<PiecewiseLinearPredictor>(
        PiecewiseLinearPredictor::load(config.model_path));
    } else {
      std::vector<Trace> set;
      for (auto & [index, t] : traces) set.push_back(std::move(t));
      out.model = std::make_shared<PiecewiseLinearPredictor>(predictor_train(set, config.train));
      if (write) out.model->save((root / "model.txt").string());
    }
    for (auto & r : out.runs) {
      if (r.spec.interventions.ml) r.spec.ml.model = out.model;
    }
  }

  run_subset(false);

  out.summary = aggregate(out.runs, out.results);
  if (write) {
    write_text_file((root / "summary.csv").string(), summary_csv(out.summary));
    write_text_file((root / "fault_free.csv").string(), fault_free_csv(out.summary));
    write_text_file((root / "summary.md").string(), render_markdown(out.summary));
    write_text_file((root / "runs.csv").string(), runs_csv(out.runs, out.results));
  }
  return out;
}

}  // namespace adas_sim
