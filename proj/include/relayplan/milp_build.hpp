#pragma once

// Deterministic equivalent of the two-stage capacity planning model. First
// stage picks one capacity transition per hub and season; the second stage
// routes every scenario's demand and buys extra capacity at a penalty.
//
// Column order: X (season, hub, from-level, to-level), then per scenario
// block F (season, scenario, period, od, arc), then E (season, scenario,
// period, hub). Row order: per block the od source rows, od sink rows, hub
// balance rows (hub outer, od inner), hub capacity rows; after all blocks
// the per (hub, season) assignment rows, then the level linkage rows
// (hub, level, season >= 1).

#include <cstdint>
#include <string>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"
#include "relayplan/network.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/scenario.hpp"

namespace relayplan {

namespace detail {

inline void check_model_inputs(const Network& net, const Horizon& horizon, const CostTable& costs,
                               const ScenarioSet& scenarios) {
  horizon.validate();
  costs.validate(net.num_hubs());
  scenarios.validate();
  if (scenarios.num_seasons() != horizon.seasons)
    throw ArgumentError("scenario set covers " + std::to_string(scenarios.num_seasons()) +
                        " seasons, horizon has " + std::to_string(horizon.seasons));
  const int pps = horizon.periods_per_season;
  const int nod = net.num_od_pairs();
  const int nhub = net.num_hubs();
  for (int t = 0; t < horizon.seasons; ++t) {
    if (scenarios.seasons[t].empty())
      throw ArgumentError("season " + std::to_string(t) + " has no scenarios");
    for (const auto& s : scenarios.seasons[t]) {
      if (s.demand.num_periods() != pps || s.disruption.num_periods() != pps)
        throw ArgumentError("scenario horizon does not match periods per season");
      for (const auto& row : s.demand.q)
        if (static_cast<int>(row.size()) != nod)
          throw ArgumentError("scenario demand dimension does not match od pairs");
      for (const auto& row : s.disruption.disrupted)
        if (static_cast<int>(row.size()) != nhub)
          throw ArgumentError("scenario disruption dimension does not match hubs");
    }
  }
}

}  // namespace detail

inline MilpInstance build_deterministic_equivalent(const Network& net, const Horizon& horizon,
                                                   const CostTable& costs,
                                                   const ScenarioSet& scenarios, PlanMode mode) {
  detail::check_model_inputs(net, horizon, costs, scenarios);

  const int T = horizon.seasons;
  const int pps = horizon.periods_per_season;
  const double m = static_cast<double>(horizon.days_per_period);
  const int nod = net.num_od_pairs();
  const int nhub = net.num_hubs();
  const int narc = net.num_arcs();
  const int L = costs.num_levels();

  MilpInstance inst;
  inst.name = "relayplan";

  // Rows. Block rows first, in (season, scenario, period) order.
  std::vector<std::vector<int>> block_base(T);
  for (int t = 0; t < T; ++t) {
    const auto& scs = scenarios.seasons[t];
    block_base[t].resize(scs.size() * pps);
    for (int w = 0; w < static_cast<int>(scs.size()); ++w) {
      for (int p = 0; p < pps; ++p) {
        int base = inst.num_rows();
        block_base[t][w * pps + p] = base;
        const auto& q = scs[w].demand.q[p];
        for (int k = 0; k < nod; ++k)
          inst.add_row(RowSense::EQ, static_cast<double>(q[k]));  // source
        for (int k = 0; k < nod; ++k)
          inst.add_row(RowSense::EQ, static_cast<double>(q[k]));  // sink
        for (int h = 0; h < nhub; ++h)
          for (int k = 0; k < nod; ++k) inst.add_row(RowSense::EQ, 0.0);  // balance
        for (int h = 0; h < nhub; ++h) inst.add_row(RowSense::LE, 0.0);   // capacity
      }
    }
  }
  const int assign_base = inst.num_rows();
  for (int h = 0; h < nhub; ++h)
    for (int t = 0; t < T; ++t) inst.add_row(RowSense::EQ, 1.0);
  const int link_base = inst.num_rows();
  for (int h = 0; h < nhub; ++h)
    for (int l = 0; l < L; ++l)
      for (int t = 1; t < T; ++t) inst.add_row(RowSense::EQ, 0.0);

  auto assign_row = [&](int h, int t) { return assign_base + h * T + t; };
  auto link_row = [&](int h, int l, int t) {
    return link_base + (h * L + l) * (T - 1) + (t - 1);
  };
  auto capacity_row = [&](int t, int w, int p, int h) {
    return block_base[t][w * pps + p] + 2 * nod + nhub * nod + h;
  };

  // X columns.
  for (int t = 0; t < T; ++t) {
    for (int h = 0; h < nhub; ++h) {
      for (int l1 = 0; l1 < L; ++l1) {
        for (int l2 = 0; l2 < L; ++l2) {
          bool fixed_zero = (t == 0 && l1 != 0) || (mode == PlanMode::Static && t >= 1 && l1 != l2);
          inst.begin_column(costs.transition_cost(h, l1, l2), 0.0, fixed_zero ? 0.0 : 1.0, true,
                            VarKey::x(h, l1, l2, t));
          inst.push_entry(assign_row(h, t), 1.0);
          if (t >= 1) inst.push_entry(link_row(h, l1, t), -1.0);
          if (t + 1 < T) inst.push_entry(link_row(h, l2, t + 1), 1.0);
          double u = costs.capacity(h, l2);
          if (u != 0.0) {
            const int nw = static_cast<int>(scenarios.seasons[t].size());
            for (int w = 0; w < nw; ++w)
              for (int p = 0; p < pps; ++p) inst.push_entry(capacity_row(t, w, p, h), -m * u);
          }
          inst.end_column();
        }
      }
    }
  }

  // F and E columns per block.
  for (int t = 0; t < T; ++t) {
    const auto& scs = scenarios.seasons[t];
    for (int w = 0; w < static_cast<int>(scs.size()); ++w) {
      const Scenario& sc = scs[w];
      const double prob = sc.probability;
      for (int p = 0; p < pps; ++p) {
        const int base = block_base[t][w * pps + p];
        for (int k = 0; k < nod; ++k) {
          const OdPair& od = net.od_pairs[k];
          const int onode = net.node_index(od.origin);
          const int dnode = net.node_index(od.dest);
          for (int a = 0; a < narc; ++a) {
            const Arc& arc = net.arcs[a];
            const int from = net.node_index(arc.from);
            const int to = net.node_index(arc.to);
            const double time = sc.travel_hours(net, a, p);
            inst.begin_column(prob * costs.flow_unit_cost * time, 0.0, kInf, false,
                              VarKey::f(k, a, p, w, t));
            if (from == onode) inst.push_entry(base + k, 1.0);
            if (to == dnode) inst.push_entry(base + nod + k, 1.0);
            int hf = net.hub_index_of_node(from);
            int ht = net.hub_index_of_node(to);
            if (hf >= 0) inst.push_entry(base + 2 * nod + hf * nod + k, 1.0);
            if (ht >= 0) {
              inst.push_entry(base + 2 * nod + ht * nod + k, -1.0);
              inst.push_entry(base + 2 * nod + nhub * nod + ht, 1.0);
            }
            inst.end_column();
          }
        }
        for (int h = 0; h < nhub; ++h) {
          inst.begin_column(prob * costs.extra_penalty[h], 0.0, kInf, false,
                            VarKey::extra(h, p, w, t));
          inst.push_entry(base + 2 * nod + nhub * nod + h, -m);
          inst.end_column();
        }
      }
    }
  }

  inst.validate();
  return inst;
}

// Second-stage activity of one solved instance, dense per block.
struct DeSolution {
  CapacityPlan plan{0, 0};
  double objective = 0.0;
  // flows[t][w][p][od][arc], extras[t][w][p][h]
  std::vector<std::vector<std::vector<std::vector<std::vector<double>>>>> flows;
  std::vector<std::vector<std::vector<std::vector<double>>>> extras;
};

inline DeSolution extract_solution(const MilpInstance& inst, const Network& net,
                                   const Horizon& horizon, const CostTable& costs,
                                   const ScenarioSet& scenarios, const std::vector<double>& x) {
  detail::check_model_inputs(net, horizon, costs, scenarios);
  if (static_cast<int>(x.size()) != inst.num_cols())
    throw ArgumentError("solution vector length does not match instance");

  const int T = horizon.seasons;
  const int pps = horizon.periods_per_season;
  const int nod = net.num_od_pairs();
  const int nhub = net.num_hubs();
  const int narc = net.num_arcs();

  DeSolution out;
  out.plan = CapacityPlan(nhub, T);
  out.objective = inst.objective_value(x);
  out.flows.resize(T);
  out.extras.resize(T);
  for (int t = 0; t < T; ++t) {
    const int nw = static_cast<int>(scenarios.seasons[t].size());
    out.flows[t].assign(nw, std::vector<std::vector<std::vector<double>>>(
                                pps, std::vector<std::vector<double>>(
                                         nod, std::vector<double>(narc, 0.0))));
    out.extras[t].assign(nw, std::vector<std::vector<double>>(pps, std::vector<double>(nhub, 0.0)));
  }

  std::vector<std::vector<int>> chosen_from(nhub, std::vector<int>(T, -1));
  std::vector<std::vector<int>> picks(nhub, std::vector<int>(T, 0));
  for (int j = 0; j < inst.num_cols(); ++j) {
    const VarKey& k = inst.key[j];
    switch (k.type) {
      case VarKey::Type::X: {
        if (std::abs(x[j] - std::round(x[j])) > tol::integrality)
          throw SolutionIntegrityError("capacity choice is fractional at column " +
                                       std::to_string(j));
        if (x[j] > 0.5) {
          out.plan.set_level(k.a, k.d, k.c);
          chosen_from[k.a][k.d] = k.b;
          ++picks[k.a][k.d];
        }
        break;
      }
      case VarKey::Type::F:
        out.flows[k.e][k.d][k.c][k.a][k.b] = x[j];
        break;
      case VarKey::Type::E:
        out.extras[k.d][k.c][k.b][k.a] = x[j];
        break;
      case VarKey::Type::Plain:
        throw SolutionIntegrityError("instance carries untyped columns");
    }
  }

  for (int h = 0; h < nhub; ++h)
    for (int t = 0; t < T; ++t) {
      if (picks[h][t] != 1)
        throw SolutionIntegrityError("hub " + std::to_string(h) + " season " + std::to_string(t) +
                                     " selects " + std::to_string(picks[h][t]) + " transitions");
      int expect = t == 0 ? 0 : out.plan.level(h, t - 1);
      if (chosen_from[h][t] != expect)
        throw SolutionIntegrityError("capacity chain broken at hub " + std::to_string(h) +
                                     " season " + std::to_string(t));
    }
  return out;
}

// Re-checks a solved plan against the model stated over the raw data rather
// than the assembled instance. Returns the largest violation found.
inline double audit_solution(const Network& net, const Horizon& horizon, const CostTable& costs,
                             const ScenarioSet& scenarios, const DeSolution& sol,
                             double claimed_objective) {
  detail::check_model_inputs(net, horizon, costs, scenarios);
  const int T = horizon.seasons;
  const int pps = horizon.periods_per_season;
  const double m = static_cast<double>(horizon.days_per_period);
  const int nod = net.num_od_pairs();
  const int nhub = net.num_hubs();
  const int narc = net.num_arcs();

  double worst = 0.0;
  double objective = sol.plan.hub_cost(costs);

  for (int t = 0; t < T; ++t) {
    const auto& scs = scenarios.seasons[t];
    for (int w = 0; w < static_cast<int>(scs.size()); ++w) {
      const Scenario& sc = scs[w];
      for (int p = 0; p < pps; ++p) {
        const auto& F = sol.flows[t][w][p];
        const auto& E = sol.extras[t][w][p];
        std::vector<double> load(nhub, 0.0);
        for (int k = 0; k < nod; ++k) {
          const OdPair& od = net.od_pairs[k];
          double out_o = 0.0, in_d = 0.0;
          std::vector<double> hub_net(nhub, 0.0);
          for (int a = 0; a < narc; ++a) {
            double f = F[k][a];
            if (f < 0.0) worst = std::max(worst, -f);
            if (f == 0.0) continue;
            const Arc& arc = net.arcs[a];
            if (arc.from == od.origin) out_o += f;
            if (arc.to == od.dest) in_d += f;
            int hf = net.hub_index_of_node(net.node_index(arc.from));
            int ht = net.hub_index_of_node(net.node_index(arc.to));
            if (hf >= 0) hub_net[hf] += f;
            if (ht >= 0) {
              hub_net[ht] -= f;
              load[ht] += f;
            }
            objective += sc.probability * costs.flow_unit_cost * sc.travel_hours(net, a, p) * f;
          }
          double q = static_cast<double>(sc.demand.q[p][k]);
          worst = std::max(worst, std::abs(out_o - q));
          worst = std::max(worst, std::abs(in_d - q));
          for (int h = 0; h < nhub; ++h) worst = std::max(worst, std::abs(hub_net[h]));
        }
        for (int h = 0; h < nhub; ++h) {
          if (E[h] < 0.0) worst = std::max(worst, -E[h]);
          double cap = m * costs.capacity(h, sol.plan.level(h, t)) + m * E[h];
          worst = std::max(worst, load[h] - cap);
          objective += sc.probability * costs.extra_penalty[h] * E[h];
        }
      }
    }
  }

  worst = std::max(worst, rel_diff(objective, claimed_objective));
  return worst;
}

}  // namespace relayplan
