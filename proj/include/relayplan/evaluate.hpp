#pragma once

// Exact evaluation of a fixed capacity plan. The second stage separates by
// (season, scenario, period); each such subproblem is a multicommodity flow
// with one soft capacity per hub. Two solution paths:
//
//  - Shortest-path routing. Per od pair the cheapest unit "atom" is either a
//    direct path or a pair of paths (one draining the origin quota into the
//    cheapest reachable destination, one filling the destination quota from
//    the cheapest reaching origin), because conservation only binds at the
//    pair's own endpoints and the hubs. This routing is exact whenever no
//    extra capacity is bought at its loads, and exact for arbitrary loads
//    when the dominance certificate below holds.
//  - A plain LP on the period subproblem, used when the shortest-path result
//    is not certified exact.
//
// Dominance certificate: if for every od pair and every realized disruption
// pattern the travel-cost gap between the best atom and the second best
// strictly exceeds the largest possible penalty saving from rerouting one
// unit (sum of per-day penalty rates over the best atom's load hubs), then
// every optimum routes all flow on best atoms regardless of capacities, so
// loads are plan-independent and the penalty term separates per hub.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"
#include "relayplan/milp_build.hpp"
#include "relayplan/network.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/scenario.hpp"
#include "relayplan/simplex.hpp"

namespace relayplan {

namespace detail {

struct ShortestPaths {
  std::vector<double> dist;
  std::vector<int> via_arc;  // arc that settled the node, -1 at the root
};

// Arc-weighted Dijkstra; `reverse` walks arcs tail-ward (distances measure
// node -> root instead of root -> node). `skip_arc` excludes one arc.
inline ShortestPaths dijkstra(const Network& net, const std::vector<double>& arc_time, int root,
                              bool reverse, int skip_arc = -1) {
  const int n = net.num_nodes();
  ShortestPaths sp;
  sp.dist.assign(n, kInf);
  sp.via_arc.assign(n, -1);
  sp.dist[root] = 0.0;
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0.0, root});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > sp.dist[u]) continue;
    const auto& adj = reverse ? net.in_arcs[u] : net.out_arcs[u];
    for (int a : adj) {
      if (a == skip_arc) continue;
      const Arc& arc = net.arcs[a];
      int v = net.node_index(reverse ? arc.from : arc.to);
      double nd = d + arc_time[a];
      if (nd < sp.dist[v] - 1e-15) {
        sp.dist[v] = nd;
        sp.via_arc[v] = a;
        heap.push({nd, v});
      }
    }
  }
  return sp;
}

// Forward path root -> node as arc indices, using via_arc parents.
inline std::vector<int> walk_path(const Network& net, const ShortestPaths& sp, int node,
                                  bool reverse) {
  std::vector<int> arcs;
  int cur = node;
  while (sp.via_arc[cur] >= 0) {
    int a = sp.via_arc[cur];
    arcs.push_back(a);
    cur = net.node_index(reverse ? net.arcs[a].to : net.arcs[a].from);
  }
  if (!reverse) std::reverse(arcs.begin(), arcs.end());
  return arcs;
}

}  // namespace detail

struct DominanceCertificate {
  bool holds = true;
  double min_margin = kInf;  // smallest (travel gap - max penalty saving), cost units
  std::string blocker;       // first reason it failed
};

struct BlockFlows {
  int season = 0;
  int scenario = 0;
  int period = 0;
  double probability = 0.0;
  // (od index, arc index, units); at most one entry per (od, arc)
  const std::vector<std::tuple<int, int, double>>* flows = nullptr;
  const std::vector<double>* extras = nullptr;  // per hub, capacity units
};
using FlowSink = std::function<void(const BlockFlows&)>;

struct EvaluationResult {
  double hub_cost = 0.0;
  double flow_cost = 0.0;     // probability-weighted transport cost
  double penalty_cost = 0.0;  // probability-weighted extra-capacity cost
  double total = 0.0;
  long lp_periods = 0;  // period subproblems that needed the LP path
  long sp_periods = 0;
};

struct EvalLimits {
  int max_lp_rows = 4000;
  long enumerate_guard = 1000000;
};

class Evaluator {
 public:
  Evaluator(const Network& net, const Horizon& horizon, const CostTable& costs,
            const ScenarioSet& scenarios, EvalLimits limits = {})
      : net_(net), horizon_(horizon), costs_(costs), scenarios_(scenarios), limits_(limits) {
    detail::check_model_inputs(net, horizon, costs, scenarios);
    collect_endpoints();
    check_uniform_intensity();
    build_blocks();
  }

  const DominanceCertificate& certificate() const { return cert_; }

  // Capacity-independent data per (season, scenario, period), in canonical
  // order. Loads are the shortest-path routing loads per hub.
  struct BlockPeriod {
    int season, scenario, period;
    double probability;
    double flow_time;  // units * stretched hours on best atoms
    std::vector<double> load;
    const std::vector<char>* mask;
  };
  const std::vector<BlockPeriod>& block_periods() const { return blocks_; }

  EvaluationResult evaluate(const CapacityPlan& plan, const FlowSink& sink = {}) const {
    check_plan(plan);
    EvaluationResult res;
    res.hub_cost = plan.hub_cost(costs_);
    const double m = static_cast<double>(horizon_.days_per_period);
    const int nhub = net_.num_hubs();
    std::vector<std::tuple<int, int, double>> flow_buf;
    std::vector<double> extra_buf(nhub, 0.0);

    for (const auto& bp : blocks_) {
      std::vector<double> cap(nhub);
      for (int h = 0; h < nhub; ++h) cap[h] = costs_.capacity(h, plan.level(h, bp.season));
      bool overflow = false;
      for (int h = 0; h < nhub; ++h) {
        extra_buf[h] = std::max(0.0, bp.load[h] / m - cap[h]);
        if (extra_buf[h] > 0.0) overflow = true;
      }
      if (!overflow || cert_.holds) {
        ++res.sp_periods;
        res.flow_cost += bp.probability * costs_.flow_unit_cost * bp.flow_time;
        double pen = 0.0;
        for (int h = 0; h < nhub; ++h) pen += costs_.extra_penalty[h] * extra_buf[h];
        res.penalty_cost += bp.probability * pen;
        if (sink) {
          materialize_flows(bp, flow_buf);
          BlockFlows bf{bp.season, bp.scenario, bp.period, bp.probability, &flow_buf, &extra_buf};
          sink(bf);
        }
      } else {
        ++res.lp_periods;
        double fc = 0.0, pc = 0.0;
        solve_period_lp(bp, cap, flow_buf, extra_buf, fc, pc);
        res.flow_cost += bp.probability * fc;
        res.penalty_cost += bp.probability * pc;
        if (sink) {
          BlockFlows bf{bp.season, bp.scenario, bp.period, bp.probability, &flow_buf, &extra_buf};
          sink(bf);
        }
      }
    }
    res.total = res.hub_cost + res.flow_cost + res.penalty_cost;
    return res;
  }

 private:
  const Network& net_;
  const Horizon& horizon_;
  const CostTable& costs_;
  const ScenarioSet& scenarios_;
  EvalLimits limits_;
  double intensity_ = 1.0;

  std::vector<int> origin_nodes_, dest_nodes_;  // unique node indices
  std::vector<int> od_origin_slot_, od_dest_slot_;

  // Best atom per od under one disruption mask.
  struct RouteChoice {
    double time = kInf;
    std::vector<int> arcs;       // all arcs carrying the unit (pair atoms concatenate)
    std::vector<int> load_hubs;  // head-hub per arc entering a hub
  };
  struct MaskRouting {
    std::vector<RouteChoice> od;
  };
  mutable std::map<std::vector<char>, MaskRouting> routing_cache_;

  std::vector<BlockPeriod> blocks_;
  mutable DominanceCertificate cert_;

  void collect_endpoints() {
    const int nod = net_.num_od_pairs();
    od_origin_slot_.resize(nod);
    od_dest_slot_.resize(nod);
    for (int k = 0; k < nod; ++k) {
      int o = net_.node_index(net_.od_pairs[k].origin);
      int d = net_.node_index(net_.od_pairs[k].dest);
      auto slot = [](std::vector<int>& list, int node) {
        for (std::size_t i = 0; i < list.size(); ++i)
          if (list[i] == node) return static_cast<int>(i);
        list.push_back(node);
        return static_cast<int>(list.size() - 1);
      };
      od_origin_slot_[k] = slot(origin_nodes_, o);
      od_dest_slot_[k] = slot(dest_nodes_, d);
    }
  }

  void check_uniform_intensity() {
    bool first = true;
    for (const auto& season : scenarios_.seasons)
      for (const auto& s : season) {
        if (first) {
          intensity_ = s.disruption.intensity;
          first = false;
        } else if (s.disruption.intensity != intensity_) {
          throw ValidationError("mixed disruption intensities are not supported");
        }
      }
  }

  std::vector<double> stretched_times(const std::vector<char>& mask) const {
    std::vector<double> t(net_.num_arcs());
    for (int a = 0; a < net_.num_arcs(); ++a) {
      const Arc& arc = net_.arcs[a];
      int hf = net_.hub_index_of_node(net_.node_index(arc.from));
      int ht = net_.hub_index_of_node(net_.node_index(arc.to));
      bool hit = (hf >= 0 && mask[hf]) || (ht >= 0 && mask[ht]);
      t[a] = arc.base_travel_hours * (hit ? intensity_ : 1.0);
    }
    return t;
  }

  // Routing plus the certificate contribution for one mask.
  const MaskRouting& routing_for(const std::vector<char>& mask) const {
    auto it = routing_cache_.find(mask);
    if (it != routing_cache_.end()) return it->second;

    const std::vector<double> times = stretched_times(mask);
    const int nod = net_.num_od_pairs();
    const double m = static_cast<double>(horizon_.days_per_period);

    std::vector<detail::ShortestPaths> fwd(origin_nodes_.size());
    for (std::size_t i = 0; i < origin_nodes_.size(); ++i)
      fwd[i] = detail::dijkstra(net_, times, origin_nodes_[i], false);
    std::vector<detail::ShortestPaths> rev(dest_nodes_.size());
    for (std::size_t i = 0; i < dest_nodes_.size(); ++i)
      rev[i] = detail::dijkstra(net_, times, dest_nodes_[i], true);

    // Cheapest drain out of each origin and fill into each destination.
    std::vector<double> s_best(origin_nodes_.size(), kInf), s_second(origin_nodes_.size(), kInf);
    std::vector<int> s_arg(origin_nodes_.size(), -1);
    for (std::size_t i = 0; i < origin_nodes_.size(); ++i) {
      for (int dn : dest_nodes_) {
        double v = fwd[i].dist[dn];
        if (v < s_best[i] - 1e-15) {
          s_best[i] = v;
          s_arg[i] = dn;
        }
      }
      if (s_arg[i] >= 0) {
        for (int dn : dest_nodes_)
          if (dn != s_arg[i]) s_second[i] = std::min(s_second[i], fwd[i].dist[dn]);
        for (int a : detail::walk_path(net_, fwd[i], s_arg[i], false)) {
          auto alt = detail::dijkstra(net_, times, origin_nodes_[i], false, a);
          for (int dn : dest_nodes_) s_second[i] = std::min(s_second[i], alt.dist[dn]);
        }
      }
    }
    std::vector<double> r_best(dest_nodes_.size(), kInf), r_second(dest_nodes_.size(), kInf);
    std::vector<int> r_arg(dest_nodes_.size(), -1);
    for (std::size_t i = 0; i < dest_nodes_.size(); ++i) {
      for (int on : origin_nodes_) {
        double v = rev[i].dist[on];
        if (v < r_best[i] - 1e-15) {
          r_best[i] = v;
          r_arg[i] = on;
        }
      }
      if (r_arg[i] >= 0) {
        for (int on : origin_nodes_)
          if (on != r_arg[i]) r_second[i] = std::min(r_second[i], rev[i].dist[on]);
        for (int a : detail::walk_path(net_, rev[i], r_arg[i], true)) {
          auto alt = detail::dijkstra(net_, times, dest_nodes_[i], true, a);
          for (int on : origin_nodes_) r_second[i] = std::min(r_second[i], alt.dist[on]);
        }
      }
    }

    MaskRouting routing;
    routing.od.resize(nod);
    for (int k = 0; k < nod; ++k) {
      const int oi = od_origin_slot_[k], di = od_dest_slot_[k];
      const int on = origin_nodes_[oi], dn = dest_nodes_[di];
      const double direct = fwd[oi].dist[dn];
      const double combo = s_best[oi] + r_best[di];
      RouteChoice rc;
      double second = kInf;
      if (direct <= combo) {
        if (direct == kInf)
          throw SolverError("od pair " + std::to_string(net_.od_pairs[k].origin) + "->" +
                            std::to_string(net_.od_pairs[k].dest) + " is unroutable");
        rc.time = direct;
        rc.arcs = detail::walk_path(net_, fwd[oi], dn, false);
        double direct2 = kInf;
        for (int a : rc.arcs) {
          auto alt = detail::dijkstra(net_, times, on, false, a);
          direct2 = std::min(direct2, alt.dist[dn]);
        }
        second = std::min(direct2, combo);
      } else {
        rc.time = combo;
        rc.arcs = detail::walk_path(net_, fwd[oi], s_arg[oi], false);
        auto fill = detail::walk_path(net_, rev[di], r_arg[di], true);
        rc.arcs.insert(rc.arcs.end(), fill.begin(), fill.end());
        double combo2 = std::min(s_second[oi] + r_best[di], s_best[oi] + r_second[di]);
        second = std::min(direct, combo2);
      }
      double pen_rate = 0.0;
      for (int a : rc.arcs) {
        int ht = net_.hub_index_of_node(net_.node_index(net_.arcs[a].to));
        if (ht >= 0) {
          rc.load_hubs.push_back(ht);
          pen_rate += costs_.extra_penalty[ht] / m;
        }
      }
      double margin = kInf;
      if (second <= rc.time + 1e-12) {
        margin = 0.0;
        if (cert_.holds) {
          cert_.holds = false;
          cert_.blocker = "tied optimal routes for od pair " +
                          std::to_string(net_.od_pairs[k].origin) + "->" +
                          std::to_string(net_.od_pairs[k].dest);
        }
      } else if (second < kInf) {
        double gap = second - rc.time;
        margin = costs_.flow_unit_cost * gap - pen_rate;
        if (margin <= 1e-9 * std::max(1.0, costs_.flow_unit_cost * gap)) {
          if (cert_.holds) {
            cert_.holds = false;
            cert_.blocker = "penalty can beat rerouting for od pair " +
                            std::to_string(net_.od_pairs[k].origin) + "->" +
                            std::to_string(net_.od_pairs[k].dest);
          }
        }
      }
      cert_.min_margin = std::min(cert_.min_margin, margin);
      routing.od[k] = std::move(rc);
    }
    return routing_cache_.emplace(mask, std::move(routing)).first->second;
  }

  void build_blocks() {
    const int pps = horizon_.periods_per_season;
    const int nhub = net_.num_hubs();
    const int nod = net_.num_od_pairs();
    for (int t = 0; t < horizon_.seasons; ++t) {
      const auto& scs = scenarios_.seasons[t];
      for (int w = 0; w < static_cast<int>(scs.size()); ++w) {
        for (int p = 0; p < pps; ++p) {
          const auto& mask = scs[w].disruption.disrupted[p];
          const MaskRouting& routing = routing_for(mask);
          BlockPeriod bp;
          bp.season = t;
          bp.scenario = w;
          bp.period = p;
          bp.probability = scs[w].probability;
          bp.load.assign(nhub, 0.0);
          bp.flow_time = 0.0;
          bp.mask = &mask;
          const auto& q = scs[w].demand.q[p];
          for (int k = 0; k < nod; ++k) {
            double units = static_cast<double>(q[k]);
            if (units == 0.0) continue;
            const RouteChoice& rc = routing.od[k];
            bp.flow_time += units * rc.time;
            for (int h : rc.load_hubs) bp.load[h] += units;
          }
          blocks_.push_back(std::move(bp));
        }
      }
    }
  }

  void check_plan(const CapacityPlan& plan) const {
    if (plan.num_hubs() != net_.num_hubs() || plan.num_seasons() != horizon_.seasons)
      throw ArgumentError("plan dimensions do not match the instance");
    for (int h = 0; h < plan.num_hubs(); ++h)
      for (int t = 0; t < plan.num_seasons(); ++t)
        if (plan.level(h, t) < 0 || plan.level(h, t) >= costs_.num_levels())
          throw ArgumentError("plan level out of range");
  }

  void materialize_flows(const BlockPeriod& bp,
                         std::vector<std::tuple<int, int, double>>& out) const {
    out.clear();
    const MaskRouting& routing = routing_for(*bp.mask);
    const auto& q = scenarios_.seasons[bp.season][bp.scenario].demand.q[bp.period];
    for (int k = 0; k < net_.num_od_pairs(); ++k) {
      double units = static_cast<double>(q[k]);
      if (units == 0.0) continue;
      for (int a : routing.od[k].arcs) out.emplace_back(k, a, units);
    }
  }

  // Exact period subproblem with fixed capacities, as a plain LP.
  void solve_period_lp(const BlockPeriod& bp, const std::vector<double>& cap,
                       std::vector<std::tuple<int, int, double>>& flows_out,
                       std::vector<double>& extras_out, double& flow_cost,
                       double& penalty_cost) const {
    const int nod = net_.num_od_pairs();
    const int nhub = net_.num_hubs();
    const int narc = net_.num_arcs();
    const double m = static_cast<double>(horizon_.days_per_period);
    const Scenario& sc = scenarios_.seasons[bp.season][bp.scenario];
    const int rows = 2 * nod + nhub * nod + nhub;
    if (rows > limits_.max_lp_rows)
      throw SolverError("period subproblem needs an LP with " + std::to_string(rows) +
                        " rows; dominance certificate failed: " + cert_.blocker);

    MilpInstance lp;
    lp.name = "period";
    const auto& q = sc.demand.q[bp.period];
    for (int k = 0; k < nod; ++k) lp.add_row(RowSense::EQ, static_cast<double>(q[k]));
    for (int k = 0; k < nod; ++k) lp.add_row(RowSense::EQ, static_cast<double>(q[k]));
    for (int h = 0; h < nhub; ++h)
      for (int k = 0; k < nod; ++k) lp.add_row(RowSense::EQ, 0.0);
    for (int h = 0; h < nhub; ++h) lp.add_row(RowSense::LE, m * cap[h]);

    for (int k = 0; k < nod; ++k) {
      const OdPair& od = net_.od_pairs[k];
      const int onode = net_.node_index(od.origin);
      const int dnode = net_.node_index(od.dest);
      for (int a = 0; a < narc; ++a) {
        const Arc& arc = net_.arcs[a];
        const int from = net_.node_index(arc.from);
        const int to = net_.node_index(arc.to);
        lp.begin_column(costs_.flow_unit_cost * sc.travel_hours(net_, a, bp.period), 0.0, kInf,
                        false);
        if (from == onode) lp.push_entry(k, 1.0);
        if (to == dnode) lp.push_entry(nod + k, 1.0);
        int hf = net_.hub_index_of_node(from);
        int ht = net_.hub_index_of_node(to);
        if (hf >= 0) lp.push_entry(2 * nod + hf * nod + k, 1.0);
        if (ht >= 0) {
          lp.push_entry(2 * nod + ht * nod + k, -1.0);
          lp.push_entry(2 * nod + nhub * nod + ht, 1.0);
        }
        lp.end_column();
      }
    }
    for (int h = 0; h < nhub; ++h) {
      lp.begin_column(costs_.extra_penalty[h], 0.0, kInf, false);
      lp.push_entry(2 * nod + nhub * nod + h, -m);
      lp.end_column();
    }

    LpSolution s = solve_lp(lp);
    if (s.status != LpStatus::Optimal)
      throw SolverError("period subproblem LP came back " + std::string(to_string(s.status)));

    flows_out.clear();
    extras_out.assign(nhub, 0.0);
    flow_cost = 0.0;
    penalty_cost = 0.0;
    for (int k = 0; k < nod; ++k)
      for (int a = 0; a < narc; ++a) {
        double f = s.x[k * narc + a];
        if (f > 1e-11) {
          flows_out.emplace_back(k, a, f);
          flow_cost += costs_.flow_unit_cost * sc.travel_hours(net_, a, bp.period) * f;
        }
      }
    for (int h = 0; h < nhub; ++h) {
      double e = s.x[nod * narc + h];
      if (e > 1e-11) {
        extras_out[h] = e;
        penalty_cost += costs_.extra_penalty[h] * e;
      }
    }
  }
};

struct EnumerationResult {
  CapacityPlan plan{0, 0};
  double objective = kInf;
  long plans_evaluated = 0;
};

// Exhaustive optimum over capacity plans, used as an oracle at desk scale.
// Visits plans in lexicographic level order and keeps the first best, so tie
// handling is deterministic.
inline EnumerationResult enumerate_plans(const Network& net, const Horizon& horizon,
                                         const CostTable& costs, const ScenarioSet& scenarios,
                                         PlanMode mode, long guard = 1000000) {
  Evaluator ev(net, horizon, costs, scenarios);
  const int H = net.num_hubs();
  const int T = horizon.seasons;
  const int L = costs.num_levels();
  const int digits = mode == PlanMode::Static ? H : H * T;

  double count = 1.0;
  for (int i = 0; i < digits; ++i) {
    count *= L;
    if (count > static_cast<double>(guard))
      throw ArgumentError("plan enumeration would visit more than " + std::to_string(guard) +
                          " plans");
  }

  EnumerationResult best;
  std::vector<int> digit(digits, 0);
  CapacityPlan plan(H, T);
  while (true) {
    for (int h = 0; h < H; ++h)
      for (int t = 0; t < T; ++t)
        plan.set_level(h, t, mode == PlanMode::Static ? digit[h] : digit[h * T + t]);
    double obj = ev.evaluate(plan).total;
    ++best.plans_evaluated;
    if (obj < best.objective - 1e-12) {
      best.objective = obj;
      best.plan = plan;
    }
    int i = digits - 1;
    while (i >= 0 && digit[i] == L - 1) digit[i--] = 0;
    if (i < 0) break;
    ++digit[i];
  }
  return best;
}

}  // namespace relayplan
