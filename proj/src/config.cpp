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

#include "adas_sim/config.hpp"

#include <set>
#include <sstream>

#include "adas_sim/report.hpp"
#include "toml.hpp"

namespace adas_sim
{

namespace
{

/// Typed accessors over one TOML table that reject unknown keys.
class Section
{
public:
  Section(const toml::table * table, std::string name, std::string origin)
  : table_(table), name_(std::move(name)), origin_(std::move(origin))
  {
  }

  bool present() const { return table_ != nullptr; }

  void allow(std::initializer_list<const char *> keys) const
  {
    if (table_ == nullptr) return;
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto & [k, v] : *table_) {
      if (!ok.count(std::string(k.str()))) fail("unknown key '" + std::string(k.str()) + "'");
    }
  }

  [[noreturn]] void fail(const std::string & what) const
  {
    throw ConfigError(origin_ + ": [" + name_ + "] " + what);
  }

  const toml::node * node(const char * key) const
  {
    return table_ != nullptr ? table_->get(key) : nullptr;
  }

  void number(const char * key, double & out) const
  {
    const toml::node * n = node(key);
    if (n == nullptr) return;
    if (auto v = n->value<double>()) {
      out = *v;
    } else {
      fail(std::string(key) + " must be a number");
    }
  }

  void integer(const char * key, int & out) const
  {
    const toml::node * n = node(key);
    if (n == nullptr) return;
    if (!n->is_integer()) fail(std::string(key) + " must be an integer");
    out = static_cast<int>(*n->value<std::int64_t>());
  }

  void boolean(const char * key, bool & out) const
  {
    const toml::node * n = node(key);
    if (n == nullptr) return;
    if (!n->is_boolean()) fail(std::string(key) + " must be true or false");
    out = *n->value<bool>();
  }

  void string(const char * key, std::string & out) const
  {
    const toml::node * n = node(key);
    if (n == nullptr) return;
    if (!n->is_string()) fail(std::string(key) + " must be a string");
    out = *n->value<std::string>();
  }

  const toml::array * array(const char * key) const
  {
    const toml::node * n = node(key);
    if (n == nullptr) return nullptr;
    if (!n->is_array()) fail(std::string(key) + " must be an array");
    return n->as_array();
  }

  void numbers(const char * key, std::vector<double> & out) const
  {
    const toml::array * a = array(key);
    if (a == nullptr) return;
    out.clear();
    for (const auto & e : *a) {
      auto v = e.value<double>();
      if (!v) fail(std::string(key) + " must hold numbers");
      out.push_back(*v);
    }
  }

  void strings(const char * key, std::vector<std::string> & out) const
  {
    const toml::array * a = array(key);
    if (a == nullptr) return;
    out.clear();
    for (const auto & e : *a) {
      if (!e.is_string()) fail(std::string(key) + " must hold strings");
      out.push_back(*e.value<std::string>());
    }
  }

  void pair(const char * key, std::optional<OutputVector> & out) const
  {
    std::vector<double> v;
    numbers(key, v);
    if (node(key) == nullptr) return;
    if (v.size() != kOutputChannels) fail(std::string(key) + " needs [longitudinal, lateral]");
    out = OutputVector{v[0], v[1]};
  }

private:
  const toml::table * table_;
  std::string name_;
  std::string origin_;
};

toml::table parse_document(const std::string & text, const std::string & origin)
{
  try {
    return toml::parse(text, origin);
  } catch (const toml::parse_error & e) {
    std::ostringstream os;
    os << origin << ':' << e.source().begin.line << ':' << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
}

void allow_top(const toml::table & doc, std::initializer_list<const char *> keys,
               const std::string & origin)
{
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto & [k, v] : doc) {
    if (!ok.count(std::string(k.str()))) {
      throw ConfigError(origin + ": unknown section '" + std::string(k.str()) + "'");
    }
  }
}

const toml::table * table_of(const toml::table & doc, const char * key, const std::string & origin)
{
  const toml::node * n = doc.get(key);
  if (n == nullptr) return nullptr;
  if (!n->is_table()) throw ConfigError(origin + ": '" + key + "' must be a table");
  return n->as_table();
}

/// Each element of an array of tables as a Section.
std::vector<Section> table_array(const toml::table & parent, const char * key,
                                 const std::string & origin)
{
  std::vector<Section> out;
  const toml::node * n = parent.get(key);
  if (n == nullptr) return out;
  const toml::array * a = n->as_array();
  if (a == nullptr) throw ConfigError(origin + ": '" + key + "' must be an array of tables");
  for (const auto & e : *a) {
    if (!e.is_table()) throw ConfigError(origin + ": '" + key + "' must be an array of tables");
    out.emplace_back(e.as_table(), key, origin);
  }
  return out;
}

}  // namespace

ScenarioSpec parse_scenario(const std::string & text, const std::string & origin)
{
  const toml::table doc = parse_document(text, origin);
  allow_top(doc, {"scenario", "road", "traffic", "lead_profile", "lane_change"}, origin);

  const Section sc(table_of(doc, "scenario", origin), "scenario", origin);
  if (!sc.present()) throw ConfigError(origin + ": missing [scenario]");
  sc.allow({"id", "base", "ego_init_speed", "init_gap", "friction", "speed_limit", "ego_length",
            "ego_width", "trigger_jitter"});

  ScenarioSpec spec;
  std::string base;
  sc.string("base", base);
  double gap = spec.init_gap;
  double mu = spec.friction;
  sc.number("init_gap", gap);
  sc.number("friction", mu);
  if (!base.empty()) {
    spec = builtin_scenario(scenario_id_from_string(base), gap, mu);
  } else {
    TrafficSpec lead;
    spec.traffic = {lead};
  }
  spec.init_gap = gap;
  spec.friction = mu;
  sc.string("id", spec.id);
  sc.number("ego_init_speed", spec.ego_init_speed);
  sc.number("speed_limit", spec.speed_limit);
  sc.number("ego_length", spec.ego_length);
  sc.number("ego_width", spec.ego_width);
  sc.number("trigger_jitter", spec.trigger_jitter);

  if (const toml::table * road_table = table_of(doc, "road", origin)) {
    const Section road(road_table, "road", origin);
    road.allow({"lane_width", "lane_count", "segment"});
    double width = spec.road.lane_width();
    int lanes = spec.road.lane_count();
    road.number("lane_width", width);
    road.integer("lane_count", lanes);
    std::vector<RoadSegment> segments = spec.road.segments();
    const auto seg_tables = table_array(*road_table, "segment", origin);
    if (!seg_tables.empty()) segments.clear();
    for (const auto & seg : seg_tables) {
      seg.allow({"kind", "length", "radius", "direction"});
      std::string kind = "straight";
      std::string dir = "left";
      double length = 0.0;
      double radius = 0.0;
      seg.string("kind", kind);
      seg.number("length", length);
      seg.number("radius", radius);
      seg.string("direction", dir);
      if (kind == "straight") {
        segments.push_back(RoadSegment::straight(length));
      } else if (kind == "arc") {
        if (!(radius > 0.0)) seg.fail("arc radius must be positive");
        if (dir != "left" && dir != "right") seg.fail("direction must be 'left' or 'right'");
        segments.push_back(RoadSegment::arc(radius, length, dir == "left"));
      } else {
        seg.fail("unknown segment kind '" + kind + "'");
      }
    }
    spec.road = LaneGeometry(segments, width, lanes);
  }

  const auto traffic = table_array(doc, "traffic", origin);
  if (!traffic.empty()) spec.traffic.clear();
  for (const auto & t : traffic) {
    t.allow({"id", "lane", "gap_offset", "speed", "length", "width"});
    TrafficSpec v;
    int id = v.id;
    t.integer("id", id);
    v.id = id;
    t.integer("lane", v.lane);
    t.number("gap_offset", v.gap_offset);
    t.number("speed", v.speed);
    t.number("length", v.length);
    t.number("width", v.width);
    spec.traffic.push_back(v);
  }

  const auto profile = table_array(doc, "lead_profile", origin);
  if (!profile.empty()) spec.lead_profile.clear();
  for (const auto & p : profile) {
    p.allow({"vehicle", "trigger_time", "trigger_gap", "target_speed", "accel"});
    SpeedEvent e;
    int vehicle = e.vehicle;
    p.integer("vehicle", vehicle);
    e.vehicle = vehicle;
    if (p.node("trigger_time") != nullptr) {
      double t = 0.0;
      p.number("trigger_time", t);
      e.trigger_time = t;
    }
    if (p.node("trigger_gap") != nullptr) {
      double g = 0.0;
      p.number("trigger_gap", g);
      e.trigger_gap = g;
    }
    if (!e.trigger_time && !e.trigger_gap) p.fail("needs trigger_time or trigger_gap");
    p.number("target_speed", e.target_speed);
    p.number("accel", e.accel);
    spec.lead_profile.push_back(e);
  }

  const auto changes = table_array(doc, "lane_change", origin);
  if (!changes.empty()) spec.lane_changes.clear();
  for (const auto & c : changes) {
    c.allow({"vehicle", "trigger_time", "target_lane", "duration"});
    LaneChangeEvent e;
    int vehicle = e.vehicle;
    c.integer("vehicle", vehicle);
    e.vehicle = vehicle;
    c.number("trigger_time", e.trigger_time);
    c.integer("target_lane", e.target_lane);
    c.number("duration", e.duration);
    spec.lane_changes.push_back(e);
  }

  spec.validate();
  return spec;
}

ScenarioSpec load_scenario_file(const std::string & path)
{
  return parse_scenario(read_text_file(path), path);
}

CampaignConfig parse_campaign(const std::string & text, const std::string & origin)
{
  const toml::table doc = parse_document(text, origin);
  allow_top(doc, {"campaign", "fault", "acc", "alc", "driver", "interventions", "ml"}, origin);
  CampaignConfig c = CampaignConfig::paper_default();

  const Section camp(table_of(doc, "campaign", origin), "campaign", origin);
  camp.allow({"seed", "repetitions", "scenarios", "init_gaps", "fault_free", "timeseries_reps",
              "threads"});
  if (const toml::node * n = camp.node("seed")) {
    if (!n->is_integer() || *n->value<std::int64_t>() < 0) camp.fail("seed must be a non-negative integer");
    c.base_seed = static_cast<std::uint64_t>(*n->value<std::int64_t>());
  }
  camp.integer("repetitions", c.repetitions);
  std::vector<std::string> scenarios;
  camp.strings("scenarios", scenarios);
  if (camp.node("scenarios") != nullptr) {
    c.scenarios.clear();
    for (const auto & s : scenarios) c.scenarios.push_back(scenario_id_from_string(s));
  }
  camp.numbers("init_gaps", c.init_gaps);
  camp.boolean("fault_free", c.fault_free);
  camp.integer("timeseries_reps", c.timeseries_reps);
  camp.integer("threads", c.threads);

  const Section fault(table_of(doc, "fault", origin), "fault", origin);
  fault.allow({"kinds", "rd_mode", "rd_schedule", "curvature_bias", "patch_start", "patch_length",
               "patch_jitter", "duration_steps"});
  std::vector<std::string> kinds;
  fault.strings("kinds", kinds);
  if (fault.node("kinds") != nullptr) {
    c.faults.clear();
    for (const auto & k : kinds) c.faults.push_back(fault_kind_from_string(k));
  }
  std::string mode;
  fault.string("rd_mode", mode);
  if (mode == "additive") {
    c.fault.rd_mode = RdFaultMode::Additive;
  } else if (mode == "substitute") {
    c.fault.rd_mode = RdFaultMode::Substitute;
  } else if (!mode.empty()) {
    fault.fail("rd_mode must be 'additive' or 'substitute'");
  }
  if (const toml::array * sched = fault.array("rd_schedule")) {
    c.fault.rd_schedule.clear();
    for (const auto & e : *sched) {
      const toml::array * p = e.as_array();
      if (p == nullptr || p->size() != 2 || !(*p)[0].value<double>() || !(*p)[1].value<double>()) {
        fault.fail("rd_schedule entries must be [below_m, value_m]");
      }
      c.fault.rd_schedule.push_back({*(*p)[0].value<double>(), *(*p)[1].value<double>()});
    }
  }
  fault.number("curvature_bias", c.fault.curvature_bias);
  fault.number("patch_start", c.fault.patch_start);
  fault.number("patch_length", c.fault.patch_length);
  fault.number("patch_jitter", c.patch_jitter);
  if (fault.node("duration_steps") != nullptr) {
    int steps = 0;
    fault.integer("duration_steps", steps);
    c.fault.duration_steps = steps;
  }

  const Section acc(table_of(doc, "acc", origin), "acc", origin);
  acc.allow({"set_speed", "time_headway", "standstill_gap", "gap_gain", "speed_gain",
             "cruise_gain", "max_accel", "max_decel"});
  acc.number("set_speed", c.acc.set_speed);
  acc.number("time_headway", c.acc.time_headway);
  acc.number("standstill_gap", c.acc.standstill_gap);
  acc.number("gap_gain", c.acc.gap_gain);
  acc.number("speed_gain", c.acc.speed_gain);
  acc.number("cruise_gain", c.acc.cruise_gain);
  acc.number("max_accel", c.acc.max_accel);
  acc.number("max_decel", c.acc.max_decel);

  const Section alc(table_of(doc, "alc", origin), "alc", origin);
  alc.allow({"offset_gain", "heading_gain", "rate_limit", "curvature_lookahead"});
  alc.number("offset_gain", c.alc.offset_gain);
  alc.number("heading_gain", c.alc.heading_gain);
  alc.number("rate_limit", c.alc.rate_limit);
  alc.number("curvature_lookahead", c.sensors.curvature_lookahead);

  const Section drv(table_of(doc, "driver", origin), "driver", origin);
  drv.allow({"brake_decel", "brake_ramp", "steer_gain", "steer_heading_gain",
             "steer_release_offset", "lane_trigger", "ldw_distance", "ldw_steps",
             "overspeed_factor", "unexpected_accel", "unsafe_gap", "release_headway"});
  drv.number("brake_decel", c.driver.brake_decel);
  drv.number("brake_ramp", c.driver.brake_ramp);
  drv.number("steer_gain", c.driver.steer_gain);
  drv.number("steer_heading_gain", c.driver.steer_heading_gain);
  drv.number("steer_release_offset", c.driver.steer_release_offset);
  drv.number("lane_trigger", c.driver.lane_trigger);
  drv.number("ldw_distance", c.driver.ldw_distance);
  drv.integer("ldw_steps", c.driver.ldw_steps);
  drv.number("overspeed_factor", c.driver.overspeed_factor);
  drv.number("unexpected_accel", c.driver.unexpected_accel);
  drv.number("unsafe_gap", c.driver.unsafe_gap);
  drv.number("release_headway", c.driver.release_headway);

  const Section iv(table_of(doc, "interventions", origin), "interventions", origin);
  iv.allow({"rows", "t_react_sweep", "t_react_row", "friction_sweep", "friction_row",
            "driver_t_react", "a_driver", "aeb_t_react"});
  std::vector<std::string> rows;
  iv.strings("rows", rows);
  if (iv.node("rows") != nullptr) {
    c.rows.clear();
    for (const auto & r : rows) c.rows.push_back(InterventionConfig::parse(r));
  }
  iv.numbers("t_react_sweep", c.t_react_sweep);
  iv.numbers("friction_sweep", c.friction_sweep);
  std::string row;
  iv.string("t_react_row", row);
  if (!row.empty()) c.t_react_row = InterventionConfig::parse(row);
  row.clear();
  iv.string("friction_row", row);
  if (!row.empty()) c.friction_row = InterventionConfig::parse(row);
  double t_react = 2.5;
  iv.number("driver_t_react", t_react);
  for (auto & r : c.rows) r.driver_t_react = t_react;
  c.friction_row.driver_t_react = t_react;
  iv.number("a_driver", c.a_driver);
  iv.number("aeb_t_react", c.aeb_t_react);
  if (!(c.a_driver > 0.0)) iv.fail("a_driver must be positive");

  const Section ml(table_of(doc, "ml", origin), "ml", origin);
  ml.allow({"model", "b0", "tau", "pieces", "stride", "ridge", "min_traces", "use_output_history",
            "max_iterations", "b0_factor", "tau_factor"});
  ml.string("model", c.model_path);
  ml.pair("b0", c.ml_b0);
  ml.pair("tau", c.ml_tau);
  std::vector<double> pieces;
  ml.numbers("pieces", pieces);
  if (ml.node("pieces") != nullptr) {
    if (pieces.size() != kOutputChannels) ml.fail("pieces needs [longitudinal, lateral]");
    c.train.pieces = {static_cast<int>(pieces[0]), static_cast<int>(pieces[1])};
  }
  int stride = static_cast<int>(c.train.stride);
  ml.integer("stride", stride);
  if (stride < 1) ml.fail("stride must be >= 1");
  c.train.stride = static_cast<std::size_t>(stride);
  ml.number("ridge", c.train.ridge);
  int min_traces = static_cast<int>(c.train.min_traces);
  ml.integer("min_traces", min_traces);
  if (min_traces < 1) ml.fail("min_traces must be >= 1");
  c.train.min_traces = static_cast<std::size_t>(min_traces);
  ml.boolean("use_output_history", c.train.use_output_history);
  ml.integer("max_iterations", c.train.max_iterations);
  ml.number("b0_factor", c.train.b0_factor);
  ml.number("tau_factor", c.train.tau_factor);
  for (const auto & v : {c.ml_b0, c.ml_tau}) {
    if (v && !((*v)[0] > 0.0 && (*v)[1] > 0.0)) ml.fail("b0 and tau must be positive");
  }

  c.validate();
  return c;
}

CampaignConfig load_campaign_file(const std::string & path)
{
  return parse_campaign(read_text_file(path), path);
}

}  // namespace adas_sim
