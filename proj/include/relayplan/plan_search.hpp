#pragma once

// Capacity plan optimization. Three exact strategies behind one driver:
//
//  * decomposition: when the routing dominance certificate holds, hub loads
//    do not depend on the plan, so the objective separates into a constant
//    transport term plus independent per-hub capacity problems. Each hub is
//    solved by a shortest-path DP over its level chain (dynamic mode) or a
//    scan over constant levels (static mode). Gap 0, scales to large hub
//    counts and long horizons.
//  * milp: branch and bound on the deterministic equivalent.
//  * enumeration: exhaustive sweep over plans, the desk-scale oracle.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "relayplan/branch_bound.hpp"
#include "relayplan/common.hpp"
#include "relayplan/evaluate.hpp"
#include "relayplan/milp_build.hpp"
#include "relayplan/network.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

enum class PlanMethod : char { Auto, Decomposition, Milp, Enumeration };

inline const char* to_string(PlanMethod m) {
  switch (m) {
    case PlanMethod::Auto: return "auto";
    case PlanMethod::Decomposition: return "decomposition";
    case PlanMethod::Milp: return "milp";
    default: return "enumeration";
  }
}

inline PlanMethod plan_method_from_string(const std::string& s) {
  if (s == "auto") return PlanMethod::Auto;
  if (s == "decomposition") return PlanMethod::Decomposition;
  if (s == "milp") return PlanMethod::Milp;
  if (s == "enumeration") return PlanMethod::Enumeration;
  throw ArgumentError("unknown method '" + s + "' (auto, decomposition, milp, enumeration)");
}

struct PlanSearchOptions {
  PlanMethod method = PlanMethod::Auto;
  double rel_gap = 1e-6;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  long max_nodes = 2000000;
  // Auto picks milp while the deterministic equivalent stays this small,
  // then falls back to enumeration.
  long milp_max_columns = 200000;
  long milp_max_rows = 2500;
  long enumerate_guard = 200000;
  EvalLimits limits;
  std::function<void(const std::string&)> log;
};

struct PlanResult {
  CapacityPlan plan{0, 0};
  double objective = kInf;
  double bound = -kInf;
  double gap = 0.0;
  std::string method;
  EvaluationResult breakdown;
  long nodes = 0;
  double wall_seconds = 0.0;
};

namespace detail {

// Penalty cost of hub h at capacity level l summed over one season's block
// periods, probability weighted.
inline std::vector<std::vector<std::vector<double>>> hub_penalty_tables(
    const Evaluator& ev, const Network& net, const Horizon& horizon, const CostTable& costs) {
  const int H = net.num_hubs();
  const int T = horizon.seasons;
  const int L = costs.num_levels();
  const double m = static_cast<double>(horizon.days_per_period);
  std::vector<std::vector<std::vector<double>>> pen(
      H, std::vector<std::vector<double>>(T, std::vector<double>(L, 0.0)));
  for (const auto& bp : ev.block_periods())
    for (int h = 0; h < H; ++h) {
      const double daily = bp.load[h] / m;
      for (int l = 0; l < L; ++l) {
        double extra = daily - costs.capacity(h, l);
        if (extra > 0.0) pen[h][bp.season][l] += bp.probability * costs.extra_penalty[h] * extra;
      }
    }
  return pen;
}

inline PlanResult solve_by_decomposition(const Evaluator& ev, const Network& net,
                                         const Horizon& horizon, const CostTable& costs,
                                         PlanMode mode) {
  if (!ev.certificate().holds)
    throw SolverError("decomposition requires the routing dominance certificate: " +
                      ev.certificate().blocker);
  const int H = net.num_hubs();
  const int T = horizon.seasons;
  const int L = costs.num_levels();
  const auto pen = hub_penalty_tables(ev, net, horizon, costs);

  PlanResult res;
  res.method = "decomposition";
  res.plan = CapacityPlan(H, T);

  for (int h = 0; h < H; ++h) {
    if (mode == PlanMode::Static) {
      double best = kInf;
      int best_l = 0;
      for (int l = 0; l < L; ++l) {
        double c = costs.transition_cost(h, 0, l);
        for (int t = 1; t < T; ++t) c += costs.transition_cost(h, l, l);
        for (int t = 0; t < T; ++t) c += pen[h][t][l];
        if (c < best - 1e-12) {
          best = c;
          best_l = l;
        }
      }
      for (int t = 0; t < T; ++t) res.plan.set_level(h, t, best_l);
      continue;
    }
    // Chain DP over (season, level); ties resolved toward lower levels.
    std::vector<std::vector<double>> dp(T, std::vector<double>(L, kInf));
    std::vector<std::vector<int>> parent(T, std::vector<int>(L, 0));
    for (int l = 0; l < L; ++l) dp[0][l] = costs.transition_cost(h, 0, l) + pen[h][0][l];
    for (int t = 1; t < T; ++t)
      for (int l = 0; l < L; ++l) {
        double best = kInf;
        int arg = 0;
        for (int p = 0; p < L; ++p) {
          double c = dp[t - 1][p] + costs.transition_cost(h, p, l);
          if (c < best - 1e-12) {
            best = c;
            arg = p;
          }
        }
        dp[t][l] = best + pen[h][t][l];
        parent[t][l] = arg;
      }
    double best = kInf;
    int cur = 0;
    for (int l = 0; l < L; ++l)
      if (dp[T - 1][l] < best - 1e-12) {
        best = dp[T - 1][l];
        cur = l;
      }
    for (int t = T - 1; t >= 0; --t) {
      res.plan.set_level(h, t, cur);
      if (t > 0) cur = parent[t][cur];
    }
  }

  res.breakdown = ev.evaluate(res.plan);
  res.objective = res.breakdown.total;
  res.bound = res.objective;
  res.gap = 0.0;
  return res;
}

}  // namespace detail

inline PlanResult optimize_plan(const Network& net, const Horizon& horizon, const CostTable& costs,
                                const ScenarioSet& scenarios, PlanMode mode,
                                const PlanSearchOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  Evaluator ev(net, horizon, costs, scenarios, opt.limits);

  PlanMethod method = opt.method;
  if (method == PlanMethod::Auto) {
    if (ev.certificate().holds) {
      method = PlanMethod::Decomposition;
    } else {
      long cols = 0, rows = 0;
      const long H = net.num_hubs(), L = costs.num_levels(), nod = net.num_od_pairs();
      const long narc = static_cast<long>(net.arcs.size());
      const long T = horizon.seasons, pps = horizon.periods_per_season;
      cols += T * H * L * L;
      rows += H * T + H * L * (T - 1);
      for (int t = 0; t < horizon.seasons; ++t) {
        const long blocks = static_cast<long>(scenarios.seasons[t].size()) * pps;
        cols += blocks * (nod * narc + H);
        rows += blocks * (2 * nod + nod * H + H);
      }
      method = (cols <= opt.milp_max_columns && rows <= opt.milp_max_rows)
                   ? PlanMethod::Milp
                   : PlanMethod::Enumeration;
    }
  }

  PlanResult res;
  switch (method) {
    case PlanMethod::Decomposition:
      res = detail::solve_by_decomposition(ev, net, horizon, costs, mode);
      break;
    case PlanMethod::Enumeration: {
      EnumerationResult enu =
          enumerate_plans(net, horizon, costs, scenarios, mode, opt.enumerate_guard);
      res.plan = enu.plan;
      res.method = "enumeration";
      res.breakdown = ev.evaluate(res.plan);
      res.objective = res.breakdown.total;
      res.bound = res.objective;
      res.gap = 0.0;
      res.nodes = enu.plans_evaluated;
      break;
    }
    case PlanMethod::Milp: {
      MilpInstance inst = build_deterministic_equivalent(net, horizon, costs, scenarios, mode);
      BnbOptions bopt;
      bopt.rel_gap = opt.rel_gap;
      bopt.max_nodes = opt.max_nodes;
      bopt.time_limit_seconds = opt.time_limit_seconds;
      bopt.log = opt.log;
      BnbResult bnb = solve_milp(inst, bopt);
      if (!bnb.has_incumbent)
        throw SolverError(std::string("branch and bound found no feasible plan: ") +
                          to_string(bnb.status));
      DeSolution de = extract_solution(inst, net, horizon, costs, scenarios, bnb.x);
      double worst = audit_solution(net, horizon, costs, scenarios, de, bnb.objective);
      if (worst > 1e-6)
        throw SolutionIntegrityError("extracted solution violates the model by " +
                                     std::to_string(worst));
      res.plan = de.plan;
      res.method = "milp";
      res.breakdown = ev.evaluate(res.plan);
      res.objective = res.breakdown.total;
      res.bound = bnb.bound;
      res.gap = detail::bnb_gap(res.objective, res.bound);
      res.nodes = bnb.nodes;
      break;
    }
    default:
      throw ArgumentError("optimize_plan: method must be resolved before dispatch");
  }

  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace relayplan
