#pragma once

// End-to-end steps shared by the command line tool and the test drivers:
// scenario generation, reduction, solving, and reporting.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "relayplan/json_io.hpp"
#include "relayplan/metrics.hpp"
#include "relayplan/network.hpp"
#include "relayplan/plan_search.hpp"
#include "relayplan/reduction.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

inline std::vector<double> annual_demands(const Network& net) {
  std::vector<double> out(net.num_od_pairs());
  for (int k = 0; k < net.num_od_pairs(); ++k) out[k] = net.od_pairs[k].annual_demand;
  return out;
}

// Full-horizon scenarios with uniform weights, straight from the config.
inline std::vector<Scenario> generate_scenarios(const Network& net, const RunConfig& cfg) {
  auto rates = weekly_demand_rates(annual_demands(net), cfg.monthly_shares, cfg.horizon);
  auto demands = gen_demand_scenarios(rates, cfg.scenario_count, cfg.seed, cfg.threads);
  auto disruptions =
      gen_disruption_scenarios(net, cfg.disruption_rate, cfg.disruption_intensity,
                               cfg.scenario_count, cfg.horizon.total_periods(), cfg.seed,
                               cfg.threads);
  return make_scenarios(demands, disruptions);
}

struct ReducedScenarios {
  std::vector<Scenario> scenarios;  // kept realizations with redistributed mass
  ReductionResult info;
};

inline ReducedScenarios reduce_scenarios(const Network& net, const std::vector<Scenario>& full,
                                         int keep, int threads = 1) {
  GroundMetricWeights w = default_metric_weights(net, full);
  auto cost = distance_matrix(net, full, w, threads);
  std::vector<double> prob(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) prob[i] = full[i].probability;
  ReducedScenarios out;
  out.info = ffs_reduce(cost, prob, keep);
  out.scenarios.reserve(out.info.selected.size());
  for (std::size_t slot = 0; slot < out.info.selected.size(); ++slot) {
    Scenario s = full[out.info.selected[slot]];
    s.probability = out.info.probability[slot];
    out.scenarios.push_back(std::move(s));
  }
  return out;
}

struct SolveRun {
  PlanResult result;
  PlanReport report;
};

inline SolveRun run_solve(const Network& net, const RunConfig& cfg, const ScenarioSet& set,
                          PlanMode mode,
                          const std::function<void(const std::string&)>& log = {}) {
  CostTable costs = cfg.cost_table(net.num_hubs());
  PlanSearchOptions opt;
  opt.method = plan_method_from_string(cfg.method);
  opt.rel_gap = cfg.gap;
  if (cfg.time_limit_seconds > 0) opt.time_limit_seconds = cfg.time_limit_seconds;
  opt.log = log;
  SolveRun run;
  run.result = optimize_plan(net, cfg.horizon, costs, set, mode, opt);
  run.report = compute_metrics(net, cfg.horizon, costs, set, run.result.plan);
  run.report.mode = to_string(mode);
  return run;
}

}  // namespace relayplan
