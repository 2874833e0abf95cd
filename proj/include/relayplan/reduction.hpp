#pragma once

// Scenario reduction by fast forward selection (Heitsch and Roemisch 2003)
// under a weighted Euclidean ground metric over demand and travel-time
// trajectories. The subset distance it minimizes greedily is the
// Kantorovich transport cost to the nearest distribution supported on the
// selected scenarios, which nearest-neighbor probability redistribution
// attains exactly.

#include <cmath>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"
#include "relayplan/network.hpp"
#include "relayplan/parallel.hpp"
#include "relayplan/scenario.hpp"
#include "relayplan/simplex.hpp"

namespace relayplan {

struct GroundMetricWeights {
  double demand = 1.0;
  double time = 1.0;
};

// Reciprocal pooled standard deviation per component family, so demand and
// travel-time spreads contribute comparably. Zero spread maps to weight 1.
inline GroundMetricWeights default_metric_weights(const Network& net,
                                                  const std::vector<Scenario>& scenarios) {
  if (scenarios.empty()) throw ArgumentError("no scenarios for metric weights");
  double dsum = 0.0, dsq = 0.0, tsum = 0.0, tsq = 0.0;
  long dn = 0, tn = 0;
  for (const auto& s : scenarios) {
    for (const auto& period : s.demand.q)
      for (auto q : period) {
        double v = static_cast<double>(q);
        dsum += v;
        dsq += v * v;
        ++dn;
      }
    int periods = s.demand.num_periods();
    for (int p = 0; p < periods; ++p)
      for (int a = 0; a < net.num_arcs(); ++a) {
        double v = s.travel_hours(net, a, p);
        tsum += v;
        tsq += v * v;
        ++tn;
      }
  }
  auto inv_sigma = [](double sum, double sq, long n) {
    if (n == 0) return 1.0;
    double mean = sum / n;
    double var = std::max(0.0, sq / n - mean * mean);
    double sigma = std::sqrt(var);
    return sigma > 1e-12 ? 1.0 / sigma : 1.0;
  };
  return {inv_sigma(dsum, dsq, dn), inv_sigma(tsum, tsq, tn)};
}

inline double scenario_distance(const Network& net, const Scenario& a, const Scenario& b,
                                const GroundMetricWeights& w = {}) {
  if (a.demand.num_periods() != b.demand.num_periods())
    throw ArgumentError("scenario horizons differ");
  double acc = 0.0;
  int periods = a.demand.num_periods();
  for (int p = 0; p < periods; ++p) {
    const auto& qa = a.demand.q[p];
    const auto& qb = b.demand.q[p];
    if (qa.size() != qb.size()) throw ArgumentError("scenario demand dimensions differ");
    for (std::size_t i = 0; i < qa.size(); ++i) {
      double d = w.demand * static_cast<double>(qa[i] - qb[i]);
      acc += d * d;
    }
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
      double d = w.time * (a.travel_hours(net, arc, p) - b.travel_hours(net, arc, p));
      acc += d * d;
    }
  }
  return std::sqrt(acc);
}

inline std::vector<std::vector<double>> distance_matrix(const Network& net,
                                                        const std::vector<Scenario>& scenarios,
                                                        const GroundMetricWeights& w = {},
                                                        int threads = 1) {
  int n = static_cast<int>(scenarios.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
  parallel_for(n, threads, [&](int i) {
    for (int j = i + 1; j < n; ++j) c[i][j] = scenario_distance(net, scenarios[i], scenarios[j], w);
  });
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) c[i][j] = c[j][i];
  return c;
}

struct ReductionResult {
  std::vector<int> selected;        // original indices in selection order
  std::vector<double> probability;  // redistributed mass per selected scenario
  std::vector<int> assigned_to;     // original index -> slot in selected
  double distance = 0.0;            // transport cost to the reduced distribution
};

// Sum of p_j times the distance from each dropped scenario to its nearest
// kept one. Equals the Kantorovich distance to the best distribution on the
// kept set.
inline double kantorovich_subset_distance(const std::vector<std::vector<double>>& cost,
                                          const std::vector<double>& prob,
                                          const std::vector<int>& selected) {
  int n = static_cast<int>(prob.size());
  std::vector<char> sel(n, 0);
  for (int i : selected) sel[i] = 1;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    if (sel[j]) continue;
    double best = kInf;
    for (int i : selected) best = std::min(best, cost[i][j]);
    total += prob[j] * best;
  }
  return total;
}

inline ReductionResult ffs_reduce(const std::vector<std::vector<double>>& cost,
                                  const std::vector<double>& prob, int k) {
  int n = static_cast<int>(prob.size());
  if (k <= 0) throw ArgumentError("reduction target must be positive");
  if (n == 0) throw ArgumentError("no scenarios to reduce");
  if (static_cast<int>(cost.size()) != n) throw ArgumentError("cost matrix size mismatch");
  double psum = 0.0;
  for (double p : prob) {
    if (p < 0.0) throw ValidationError("negative scenario probability");
    psum += p;
  }
  if (std::abs(psum - 1.0) > 1e-9) throw ValidationError("scenario probabilities must sum to 1");

  ReductionResult out;
  if (k >= n) {
    out.selected.resize(n);
    out.probability = prob;
    out.assigned_to.resize(n);
    for (int i = 0; i < n; ++i) {
      out.selected[i] = i;
      out.assigned_to[i] = i;
    }
    return out;
  }

  std::vector<char> sel(n, 0);
  std::vector<double> d(n);  // distance to nearest selected so far

  // First pick: scenario minimizing expected distance to all others.
  int first = 0;
  double best = kInf;
  for (int u = 0; u < n; ++u) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += prob[j] * cost[u][j];
    if (s < best - 1e-15) {
      best = s;
      first = u;
    }
  }
  sel[first] = 1;
  out.selected.push_back(first);
  for (int j = 0; j < n; ++j) d[j] = cost[first][j];

  while (static_cast<int>(out.selected.size()) < k) {
    int pick = -1;
    best = kInf;
    for (int u = 0; u < n; ++u) {
      if (sel[u]) continue;
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (sel[j] || j == u) continue;
        s += prob[j] * std::min(d[j], cost[u][j]);
      }
      if (s < best - 1e-15) {
        best = s;
        pick = u;
      }
    }
    sel[pick] = 1;
    out.selected.push_back(pick);
    for (int j = 0; j < n; ++j) d[j] = std::min(d[j], cost[pick][j]);
  }

  // Redistribute dropped mass to the nearest kept scenario, lowest original
  // index on ties.
  out.probability.assign(out.selected.size(), 0.0);
  out.assigned_to.assign(n, -1);
  std::vector<int> slot_of(n, -1);
  for (std::size_t s = 0; s < out.selected.size(); ++s) slot_of[out.selected[s]] = static_cast<int>(s);
  std::vector<int> by_index = out.selected;
  std::sort(by_index.begin(), by_index.end());
  for (int j = 0; j < n; ++j) {
    if (sel[j]) {
      out.assigned_to[j] = slot_of[j];
      out.probability[slot_of[j]] += prob[j];
      continue;
    }
    int nearest = -1;
    double bd = kInf;
    for (int i : by_index) {
      if (cost[i][j] < bd - 1e-15) {
        bd = cost[i][j];
        nearest = i;
      }
    }
    out.assigned_to[j] = slot_of[nearest];
    out.probability[slot_of[nearest]] += prob[j];
    out.distance += prob[j] * bd;
  }
  return out;
}

// Optimal transport cost between two discrete distributions under an
// explicit cost matrix, solved as a plain LP. Used to cross-check the
// closed-form subset distance.
inline double transport_distance(const std::vector<std::vector<double>>& cost,
                                 const std::vector<double>& p, const std::vector<double>& q) {
  int n = static_cast<int>(p.size());
  int m = static_cast<int>(q.size());
  if (static_cast<int>(cost.size()) != n) throw ArgumentError("cost matrix rows mismatch");
  double ps = 0.0, qs = 0.0;
  for (double v : p) ps += v;
  for (double v : q) qs += v;
  if (std::abs(ps - qs) > 1e-9) throw ArgumentError("transport marginals must have equal mass");

  MilpInstance inst;
  inst.name = "transport";
  for (int i = 0; i < n; ++i) inst.add_row(RowSense::EQ, p[i]);
  for (int j = 0; j < m; ++j) inst.add_row(RowSense::EQ, q[j]);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(cost[i].size()) != m) throw ArgumentError("cost matrix cols mismatch");
    for (int j = 0; j < m; ++j) {
      inst.begin_column(cost[i][j], 0.0, kInf, false);
      inst.push_entry(i, 1.0);
      inst.push_entry(n + j, 1.0);
      inst.end_column();
    }
  }
  LpSolution s = solve_lp(inst);
  if (s.status != LpStatus::Optimal) throw SolverError("transport LP did not solve");
  return s.objective;
}

}  // namespace relayplan
