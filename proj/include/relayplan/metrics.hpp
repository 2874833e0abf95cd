#pragma once

// Operational report for a capacity plan: cost breakdown, capacity posture,
// stress statistics under the scenario set, and fuel/emission estimates for
// the expected routing.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/evaluate.hpp"
#include "relayplan/network.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

struct EmissionFactors {
  double vehicles_per_truck = 8.0;  // relay vehicles consolidated per truck trip
  double miles_per_gallon = 6.0;
  double diesel_kg_per_gallon = 3.22;
  double co2_kg_per_gallon = 10.21;
};

struct PlanReport {
  std::string mode;
  double total_cost = 0.0;
  double hub_cost = 0.0;
  double transport_cost = 0.0;
  double penalty_cost = 0.0;
  double total_contracted_capacity = 0.0;  // units/day summed over hub-seasons
  double avg_hub_capacity = 0.0;           // mean over contracted hub-seasons
  double avg_num_hubs = 0.0;               // mean contracted hubs per season
  double avg_hub_connectivity = 0.0;       // mean hub-hub degree among contracted hubs
  double extra_capacity_usage_pct = 0.0;   // expected extra vs contracted capacity
  double extra_capacity_usage_freq_pct = 0.0;  // hub-periods that buy extra capacity
  double disruption_time_pct = 0.0;            // flow-hours spent on disrupted arcs
  double disrupted_edge_usage_freq_pct = 0.0;  // disrupted arcs that still carry flow
  double truck_miles = 0.0;                    // expected, consolidated
  double fuel_gallons = 0.0;
  double fuel_metric_tons = 0.0;
  double co2_metric_tons = 0.0;
};

// Fixed field order shared by the CSV and comparison writers.
inline const std::vector<std::pair<const char*, double PlanReport::*>>& report_fields() {
  static const std::vector<std::pair<const char*, double PlanReport::*>> fields = {
      {"total_cost", &PlanReport::total_cost},
      {"hub_cost", &PlanReport::hub_cost},
      {"transport_cost", &PlanReport::transport_cost},
      {"penalty_cost", &PlanReport::penalty_cost},
      {"total_contracted_capacity", &PlanReport::total_contracted_capacity},
      {"avg_hub_capacity", &PlanReport::avg_hub_capacity},
      {"avg_num_hubs", &PlanReport::avg_num_hubs},
      {"avg_hub_connectivity", &PlanReport::avg_hub_connectivity},
      {"extra_capacity_usage_pct", &PlanReport::extra_capacity_usage_pct},
      {"extra_capacity_usage_freq_pct", &PlanReport::extra_capacity_usage_freq_pct},
      {"disruption_time_pct", &PlanReport::disruption_time_pct},
      {"disrupted_edge_usage_freq_pct", &PlanReport::disrupted_edge_usage_freq_pct},
      {"truck_miles", &PlanReport::truck_miles},
      {"fuel_gallons", &PlanReport::fuel_gallons},
      {"fuel_metric_tons", &PlanReport::fuel_metric_tons},
      {"co2_metric_tons", &PlanReport::co2_metric_tons},
  };
  return fields;
}

inline PlanReport compute_metrics(const Network& net, const Horizon& horizon,
                                  const CostTable& costs, const ScenarioSet& scenarios,
                                  const CapacityPlan& plan, const EmissionFactors& emissions = {},
                                  EvalLimits limits = {}) {
  const int H = net.num_hubs();
  const int T = horizon.seasons;
  const int pps = horizon.periods_per_season;
  const int narc = static_cast<int>(net.arcs.size());

  PlanReport rep;
  rep.mode = plan.is_static() ? "static" : "dynamic";

  // Capacity posture from the plan alone.
  int contracted_cells = 0;
  std::vector<std::vector<char>> hub_adj(H, std::vector<char>(H, 0));
  for (const auto& arc : net.arcs) {
    int hf = net.hub_index_of_node(net.node_index(arc.from));
    int ht = net.hub_index_of_node(net.node_index(arc.to));
    if (hf >= 0 && ht >= 0 && hf != ht) hub_adj[hf][ht] = hub_adj[ht][hf] = 1;
  }
  for (int t = 0; t < T; ++t) {
    std::vector<int> active;
    for (int h = 0; h < H; ++h) {
      double u = plan.contracted_capacity(costs, h, t);
      rep.total_contracted_capacity += u;
      if (plan.level(h, t) > 0) {
        rep.avg_hub_capacity += u;
        ++contracted_cells;
        active.push_back(h);
      }
    }
    rep.avg_num_hubs += static_cast<double>(active.size());
    if (!active.empty()) {
      double degrees = 0.0;
      for (int a : active)
        for (int b : active)
          if (hub_adj[a][b]) degrees += 1.0;
      rep.avg_hub_connectivity += degrees / static_cast<double>(active.size());
    }
  }
  if (contracted_cells > 0) rep.avg_hub_capacity /= contracted_cells;
  rep.avg_num_hubs /= T;
  rep.avg_hub_connectivity /= T;

  // Stress and routing statistics, probability weighted over blocks.
  double expected_extra = 0.0;
  double extra_events = 0.0;
  double flow_hours = 0.0;
  double disrupted_flow_hours = 0.0;
  double disrupted_arc_periods = 0.0;
  double disrupted_used_arc_periods = 0.0;
  double vehicle_miles = 0.0;
  std::vector<double> arc_flow(narc, 0.0);

  Evaluator ev(net, horizon, costs, scenarios, limits);
  FlowSink sink = [&](const BlockFlows& bf) {
    const Scenario& sc = scenarios.seasons[bf.season][bf.scenario];
    const double p = bf.probability;
    for (int h = 0; h < H; ++h) {
      double e = (*bf.extras)[h];
      expected_extra += p * e;
      if (e > 1e-9) extra_events += p;
    }
    std::fill(arc_flow.begin(), arc_flow.end(), 0.0);
    for (const auto& [od, a, units] : *bf.flows) {
      (void)od;
      arc_flow[a] += units;
    }
    for (int a = 0; a < narc; ++a) {
      bool hit = sc.disruption.arc_disrupted(net, a, bf.period);
      if (hit) disrupted_arc_periods += p;
      if (arc_flow[a] <= 1e-9) continue;
      double fh = arc_flow[a] * sc.travel_hours(net, a, bf.period);
      flow_hours += p * fh;
      if (hit) {
        disrupted_flow_hours += p * fh;
        disrupted_used_arc_periods += p;
      }
      vehicle_miles += p * arc_flow[a] * net.arcs[a].miles;
    }
  };
  EvaluationResult eval = ev.evaluate(plan, sink);

  rep.hub_cost = eval.hub_cost;
  rep.transport_cost = eval.flow_cost;
  rep.penalty_cost = eval.penalty_cost;
  rep.total_cost = eval.total;

  double capacity_period_units = rep.total_contracted_capacity * pps;
  if (capacity_period_units > 0.0)
    rep.extra_capacity_usage_pct =
        std::clamp(100.0 * expected_extra / capacity_period_units, 0.0, 100.0);
  rep.extra_capacity_usage_freq_pct =
      100.0 * extra_events / (static_cast<double>(H) * horizon.total_periods());
  if (flow_hours > 0.0) rep.disruption_time_pct = 100.0 * disrupted_flow_hours / flow_hours;
  if (disrupted_arc_periods > 0.0)
    rep.disrupted_edge_usage_freq_pct = 100.0 * disrupted_used_arc_periods / disrupted_arc_periods;

  rep.truck_miles = vehicle_miles / emissions.vehicles_per_truck;
  rep.fuel_gallons = rep.truck_miles / emissions.miles_per_gallon;
  rep.fuel_metric_tons = rep.fuel_gallons * emissions.diesel_kg_per_gallon / 1000.0;
  rep.co2_metric_tons = rep.fuel_gallons * emissions.co2_kg_per_gallon / 1000.0;
  return rep;
}

namespace detail {
inline std::string metric_str(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}
}  // namespace detail

inline std::string report_to_csv(const PlanReport& rep) {
  std::string out = "metric,value\nmode," + rep.mode + "\n";
  for (const auto& [name, member] : report_fields())
    out += std::string(name) + "," + detail::metric_str(rep.*member) + "\n";
  return out;
}

struct LabeledReport {
  std::string label;
  PlanReport report;
};

// Side-by-side table; every run after the first gets a delta column against
// the first run.
inline std::string compare_to_csv(const std::vector<LabeledReport>& runs) {
  if (runs.empty()) throw ArgumentError("no runs to compare");
  std::string out = "metric";
  for (const auto& r : runs) out += "," + r.label;
  for (std::size_t i = 1; i < runs.size(); ++i)
    out += "," + runs[i].label + "_minus_" + runs[0].label;
  out += "\n";
  for (const auto& [name, member] : report_fields()) {
    out += name;
    for (const auto& r : runs) out += "," + detail::metric_str(r.report.*member);
    for (std::size_t i = 1; i < runs.size(); ++i)
      out += "," + detail::metric_str(runs[i].report.*member - runs[0].report.*member);
    out += "\n";
  }
  return out;
}

}  // namespace relayplan
