#pragma once

// JSON and CSV input/output. JSON objects serialize with sorted keys and
// shortest round-trip numbers, so identical runs produce identical bytes.

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "relayplan/common.hpp"
#include "relayplan/metrics.hpp"
#include "relayplan/network.hpp"
#include "relayplan/plan_search.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/reduction.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

namespace detail {

inline void require_keys(const nlohmann::json& j, const char* where,
                         std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ParseError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ParseError("unknown key '" + item.key() + "' in " + where);
  }
}

template <typename T>
T get_req(const nlohmann::json& j, const char* where, const char* key) {
  if (!j.contains(key))
    throw ParseError(std::string(where) + " is missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(where) + " key '" + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const nlohmann::json& j, const char* where, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string(where) + " key '" + key + "': " + e.what());
  }
}

}  // namespace detail

inline NodeKind node_kind_from_string(const std::string& s) {
  if (s == "origin") return NodeKind::Origin;
  if (s == "destination") return NodeKind::Destination;
  if (s == "hub") return NodeKind::Hub;
  throw ParseError("unknown node kind '" + s + "'");
}

inline nlohmann::json to_json(const NetworkSpec& spec) {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : spec.nodes)
    j["nodes"].push_back(
        {{"id", n.id}, {"kind", to_string(n.kind)}, {"lat", n.lat}, {"lon", n.lon}});
  if (!spec.distances.empty()) j["distances"] = spec.distances;
  j["od_pairs"] = nlohmann::json::array();
  for (const auto& od : spec.od_pairs)
    j["od_pairs"].push_back(
        {{"origin", od.origin}, {"dest", od.dest}, {"annual_demand", od.annual_demand}});
  return j;
}

inline NetworkSpec network_spec_from_json(const nlohmann::json& j) {
  detail::require_keys(j, "network", {"nodes", "distances", "od_pairs"});
  NetworkSpec spec;
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw ParseError("network needs a 'nodes' array");
  for (const auto& nj : j["nodes"]) {
    detail::require_keys(nj, "node", {"id", "kind", "lat", "lon"});
    Node n;
    n.id = detail::get_req<int>(nj, "node", "id");
    n.kind = node_kind_from_string(detail::get_req<std::string>(nj, "node", "kind"));
    n.lat = detail::get_req<double>(nj, "node", "lat");
    n.lon = detail::get_req<double>(nj, "node", "lon");
    spec.nodes.push_back(n);
  }
  if (j.contains("distances") && !j["distances"].is_null())
    spec.distances = detail::get_req<std::vector<std::vector<double>>>(j, "network", "distances");
  if (!j.contains("od_pairs") || !j["od_pairs"].is_array())
    throw ParseError("network needs an 'od_pairs' array");
  for (const auto& oj : j["od_pairs"]) {
    detail::require_keys(oj, "od pair", {"origin", "dest", "annual_demand"});
    OdPair od;
    od.origin = detail::get_req<int>(oj, "od pair", "origin");
    od.dest = detail::get_req<int>(oj, "od pair", "dest");
    od.annual_demand = detail::get_req<double>(oj, "od pair", "annual_demand");
    spec.od_pairs.push_back(od);
  }
  return spec;
}

// One bag of knobs shared by the CLI subcommands; everything has a default
// so a config file only states what it changes.
struct RunConfig {
  Horizon horizon;
  BuildOptions build;
  std::vector<double> capacity_levels = {0.0, 60.0, 120.0, 180.0};
  double flow_unit_cost = 1.0;
  double extra_penalty_per_unit = 25.0;
  double operate_cost_per_unit = 40.0;
  double change_cost_per_unit = 10.0;
  std::vector<double> monthly_shares = std::vector<double>(12, 1.0 / 12.0);
  int scenario_count = 50;
  int reduce_to = 10;
  double disruption_rate = 0.05;
  double disruption_intensity = 1.5;
  std::uint64_t seed = 1;
  std::string mode = "dynamic";
  std::string method = "auto";
  double gap = 1e-6;
  double time_limit_seconds = 0.0;  // 0 means no limit
  int threads = 1;

  CostTable cost_table(int hubs) const {
    return CostTable::uniform(hubs, capacity_levels, flow_unit_cost, extra_penalty_per_unit,
                              operate_cost_per_unit, change_cost_per_unit);
  }
  PlanMode plan_mode() const {
    if (mode == "dynamic") return PlanMode::Dynamic;
    if (mode == "static") return PlanMode::Static;
    throw ArgumentError("mode must be 'dynamic' or 'static', got '" + mode + "'");
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["horizon"] = {{"seasons", c.horizon.seasons},
                  {"periods_per_season", c.horizon.periods_per_season},
                  {"days_per_period", c.horizon.days_per_period}};
  j["build"] = {{"max_leg_hours", c.build.max_leg_hours},
                {"speed_mph", c.build.speed_mph},
                {"allow_direct", c.build.allow_direct}};
  j["costs"] = {{"flow_unit_cost", c.flow_unit_cost},
                {"capacity_levels", c.capacity_levels},
                {"extra_penalty_per_unit", c.extra_penalty_per_unit},
                {"operate_cost_per_unit", c.operate_cost_per_unit},
                {"change_cost_per_unit", c.change_cost_per_unit}};
  j["demand"] = {{"monthly_shares", c.monthly_shares}};
  j["scenarios"] = {{"count", c.scenario_count},
                    {"reduce_to", c.reduce_to},
                    {"disruption_rate", c.disruption_rate},
                    {"disruption_intensity", c.disruption_intensity},
                    {"seed", c.seed}};
  j["solve"] = {{"mode", c.mode},
                {"method", c.method},
                {"gap", c.gap},
                {"time_limit_seconds", c.time_limit_seconds},
                {"threads", c.threads}};
  return j;
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
  detail::require_keys(j, "config",
                       {"horizon", "build", "costs", "demand", "scenarios", "solve"});
  RunConfig c;
  if (j.contains("horizon")) {
    const auto& h = j["horizon"];
    detail::require_keys(h, "horizon", {"seasons", "periods_per_season", "days_per_period"});
    c.horizon.seasons = detail::get_or(h, "horizon", "seasons", c.horizon.seasons);
    c.horizon.periods_per_season =
        detail::get_or(h, "horizon", "periods_per_season", c.horizon.periods_per_season);
    c.horizon.days_per_period =
        detail::get_or(h, "horizon", "days_per_period", c.horizon.days_per_period);
  }
  if (j.contains("build")) {
    const auto& b = j["build"];
    detail::require_keys(b, "build", {"max_leg_hours", "speed_mph", "allow_direct"});
    c.build.max_leg_hours = detail::get_or(b, "build", "max_leg_hours", c.build.max_leg_hours);
    c.build.speed_mph = detail::get_or(b, "build", "speed_mph", c.build.speed_mph);
    c.build.allow_direct = detail::get_or(b, "build", "allow_direct", c.build.allow_direct);
  }
  if (j.contains("costs")) {
    const auto& k = j["costs"];
    detail::require_keys(k, "costs",
                         {"flow_unit_cost", "capacity_levels", "extra_penalty_per_unit",
                          "operate_cost_per_unit", "change_cost_per_unit"});
    c.flow_unit_cost = detail::get_or(k, "costs", "flow_unit_cost", c.flow_unit_cost);
    c.capacity_levels = detail::get_or(k, "costs", "capacity_levels", c.capacity_levels);
    c.extra_penalty_per_unit =
        detail::get_or(k, "costs", "extra_penalty_per_unit", c.extra_penalty_per_unit);
    c.operate_cost_per_unit =
        detail::get_or(k, "costs", "operate_cost_per_unit", c.operate_cost_per_unit);
    c.change_cost_per_unit =
        detail::get_or(k, "costs", "change_cost_per_unit", c.change_cost_per_unit);
  }
  if (j.contains("demand")) {
    const auto& d = j["demand"];
    detail::require_keys(d, "demand", {"monthly_shares"});
    c.monthly_shares = detail::get_or(d, "demand", "monthly_shares", c.monthly_shares);
  }
  if (j.contains("scenarios")) {
    const auto& s = j["scenarios"];
    detail::require_keys(
        s, "scenarios",
        {"count", "reduce_to", "disruption_rate", "disruption_intensity", "seed"});
    c.scenario_count = detail::get_or(s, "scenarios", "count", c.scenario_count);
    c.reduce_to = detail::get_or(s, "scenarios", "reduce_to", c.reduce_to);
    c.disruption_rate = detail::get_or(s, "scenarios", "disruption_rate", c.disruption_rate);
    c.disruption_intensity =
        detail::get_or(s, "scenarios", "disruption_intensity", c.disruption_intensity);
    c.seed = detail::get_or(s, "scenarios", "seed", c.seed);
  }
  if (j.contains("solve")) {
    const auto& s = j["solve"];
    detail::require_keys(s, "solve", {"mode", "method", "gap", "time_limit_seconds", "threads"});
    c.mode = detail::get_or(s, "solve", "mode", c.mode);
    c.method = detail::get_or(s, "solve", "method", c.method);
    c.gap = detail::get_or(s, "solve", "gap", c.gap);
    c.time_limit_seconds = detail::get_or(s, "solve", "time_limit_seconds", c.time_limit_seconds);
    c.threads = detail::get_or(s, "solve", "threads", c.threads);
  }
  return c;
}

inline nlohmann::json to_json(const std::vector<Scenario>& scenarios) {
  nlohmann::json j;
  j["scenarios"] = nlohmann::json::array();
  for (const auto& s : scenarios) {
    nlohmann::json sj;
    sj["probability"] = s.probability;
    sj["intensity"] = s.disruption.intensity;
    sj["demand"] = s.demand.q;
    nlohmann::json dis = nlohmann::json::array();
    for (const auto& row : s.disruption.disrupted) {
      nlohmann::json r = nlohmann::json::array();
      for (char v : row) r.push_back(static_cast<int>(v));
      dis.push_back(std::move(r));
    }
    sj["disrupted"] = std::move(dis);
    j["scenarios"].push_back(std::move(sj));
  }
  return j;
}

inline std::vector<Scenario> scenarios_from_json(const nlohmann::json& j) {
  detail::require_keys(j, "scenario file", {"scenarios"});
  if (!j.contains("scenarios") || !j["scenarios"].is_array())
    throw ParseError("scenario file needs a 'scenarios' array");
  std::vector<Scenario> out;
  for (const auto& sj : j["scenarios"]) {
    detail::require_keys(sj, "scenario", {"probability", "intensity", "demand", "disrupted"});
    Scenario s;
    s.probability = detail::get_req<double>(sj, "scenario", "probability");
    s.disruption.intensity = detail::get_req<double>(sj, "scenario", "intensity");
    s.demand.q = detail::get_req<std::vector<std::vector<std::int64_t>>>(sj, "scenario", "demand");
    auto rows = detail::get_req<std::vector<std::vector<int>>>(sj, "scenario", "disrupted");
    s.disruption.disrupted.reserve(rows.size());
    for (const auto& row : rows) {
      std::vector<char> r(row.size());
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] != 0 && row[i] != 1) throw ParseError("disrupted flags must be 0 or 1");
        r[i] = static_cast<char>(row[i]);
      }
      s.disruption.disrupted.push_back(std::move(r));
    }
    if (s.demand.q.size() != s.disruption.disrupted.size())
      throw ParseError("scenario demand and disruption span different period counts");
    out.push_back(std::move(s));
  }
  if (out.empty()) throw ParseError("scenario file holds no scenarios");
  return out;
}

inline nlohmann::json plan_to_json(const CapacityPlan& plan, const CostTable& costs) {
  nlohmann::json j;
  std::vector<std::vector<int>> levels(plan.num_hubs(), std::vector<int>(plan.num_seasons()));
  std::vector<std::vector<double>> caps(plan.num_hubs(), std::vector<double>(plan.num_seasons()));
  for (int h = 0; h < plan.num_hubs(); ++h)
    for (int t = 0; t < plan.num_seasons(); ++t) {
      levels[h][t] = plan.level(h, t);
      caps[h][t] = plan.contracted_capacity(costs, h, t);
    }
  j["levels"] = levels;
  j["capacities"] = caps;
  return j;
}

inline CapacityPlan plan_from_json(const nlohmann::json& j) {
  auto levels = detail::get_req<std::vector<std::vector<int>>>(j, "plan", "levels");
  if (levels.empty() || levels[0].empty()) throw ParseError("plan 'levels' must be non-empty");
  CapacityPlan plan(static_cast<int>(levels.size()), static_cast<int>(levels[0].size()));
  for (std::size_t h = 0; h < levels.size(); ++h) {
    if (levels[h].size() != levels[0].size()) throw ParseError("plan 'levels' rows are ragged");
    for (std::size_t t = 0; t < levels[h].size(); ++t)
      plan.set_level(static_cast<int>(h), static_cast<int>(t), levels[h][t]);
  }
  return plan;
}

inline nlohmann::json solution_to_json(const PlanResult& res, const CostTable& costs) {
  nlohmann::json j;
  j["mode"] = res.plan.is_static() ? "static" : "dynamic";
  j["method"] = res.method;
  j["objective"] = res.objective;
  j["bound"] = res.bound;
  j["gap"] = res.gap;
  j["hub_cost"] = res.breakdown.hub_cost;
  j["transport_cost"] = res.breakdown.flow_cost;
  j["penalty_cost"] = res.breakdown.penalty_cost;
  j["plan"] = plan_to_json(res.plan, costs);
  return j;
}

inline nlohmann::json report_to_json(const PlanReport& rep) {
  nlohmann::json j;
  j["mode"] = rep.mode;
  for (const auto& [name, member] : report_fields()) j[name] = rep.*member;
  return j;
}

inline nlohmann::json compare_to_json(const std::vector<LabeledReport>& runs) {
  if (runs.empty()) throw ArgumentError("no runs to compare");
  nlohmann::json j;
  for (const auto& r : runs) j["runs"][r.label] = report_to_json(r.report);
  for (std::size_t i = 1; i < runs.size(); ++i) {
    nlohmann::json d;
    for (const auto& [name, member] : report_fields())
      d[name] = runs[i].report.*member - runs[0].report.*member;
    j["deltas"][runs[i].label + "_minus_" + runs[0].label] = std::move(d);
  }
  return j;
}

inline std::string reduction_to_csv(const ReductionResult& red) {
  std::string out = "slot,original_index,probability,subset_distance\n";
  for (std::size_t i = 0; i < red.selected.size(); ++i)
    out += std::to_string(i) + "," + std::to_string(red.selected[i]) + "," +
           detail::metric_str(red.probability[i]) + "," + detail::metric_str(red.distance) + "\n";
  return out;
}

inline nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << content;
  if (!out) throw ArgumentError("short write to " + path);
}

inline nlohmann::json load_json_file(const std::string& path) {
  return parse_json(read_text_file(path), path);
}

// demand.csv: header "origin,dest,annual_demand" then one od pair per line.
inline std::vector<OdPair> read_demand_csv(std::istream& in) {
  std::vector<OdPair> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "origin,dest,annual_demand") continue;
    OdPair od;
    char extra;
    if (std::sscanf(line.c_str(), "%d,%d,%lf%c", &od.origin, &od.dest, &od.annual_demand,
                    &extra) != 3)
      throw ParseError("expected 'origin,dest,annual_demand'", lineno);
    out.push_back(od);
  }
  if (out.empty()) throw ParseError("no od pairs in demand file", lineno);
  return out;
}

// shares.csv: header "month,share" then months 1..12, each exactly once.
inline std::vector<double> read_monthly_shares_csv(std::istream& in) {
  std::vector<double> shares(12, -1.0);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line == "month,share") continue;
    int month = 0;
    double share = 0.0;
    char extra;
    if (std::sscanf(line.c_str(), "%d,%lf%c", &month, &share, &extra) != 2)
      throw ParseError("expected 'month,share'", lineno);
    if (month < 1 || month > 12) throw ParseError("month must be 1..12", lineno);
    if (shares[month - 1] >= 0.0)
      throw ParseError("month " + std::to_string(month) + " listed twice", lineno);
    shares[month - 1] = share;
  }
  for (int i = 0; i < 12; ++i)
    if (shares[i] < 0.0)
      throw ParseError("month " + std::to_string(i + 1) + " missing from shares file", lineno);
  return shares;
}

}  // namespace relayplan
