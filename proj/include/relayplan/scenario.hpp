#pragma once

// Discrete scenarios for demand and travel-time uncertainty. Demand follows a
// Poisson draw per operational period and OD pair; travel-time uncertainty
// comes from independent hub disruptions that stretch incident arcs by a
// fixed intensity factor.

#include <cstdint>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/network.hpp"
#include "relayplan/parallel.hpp"
#include "relayplan/planning.hpp"
#include "relayplan/rng.hpp"

namespace relayplan {

// Demand per operational period, indexed [period][od_index] in the order of
// Network::od_pairs. Units are non-negative integers.
struct DemandRealization {
  std::vector<std::vector<std::int64_t>> q;

  int num_periods() const { return static_cast<int>(q.size()); }
};

// Disrupted hubs per operational period, as flags in hub-index order. The arc
// multiplier map is derived: an arc is stretched by `intensity` exactly when
// one of its endpoints is a disrupted hub in that period, else factor 1.
struct DisruptionRealization {
  double intensity = 1.0;
  std::vector<std::vector<char>> disrupted;  // [period][hub_index]

  int num_periods() const { return static_cast<int>(disrupted.size()); }

  bool hub_disrupted(int period, int hub_index) const {
    return disrupted[period][hub_index] != 0;
  }

  bool arc_disrupted(const Network& net, int arc_index, int period) const {
    const Arc& a = net.arcs[arc_index];
    int hf = net.hub_index_of_node(net.node_index(a.from));
    int ht = net.hub_index_of_node(net.node_index(a.to));
    return (hf >= 0 && hub_disrupted(period, hf)) || (ht >= 0 && hub_disrupted(period, ht));
  }

  double factor(const Network& net, int arc_index, int period) const {
    return arc_disrupted(net, arc_index, period) ? intensity : 1.0;
  }
};

struct Scenario {
  double probability = 1.0;
  DemandRealization demand;
  DisruptionRealization disruption;

  // Realized travel time on an arc in a (local) period of this scenario.
  double travel_hours(const Network& net, int arc_index, int period) const {
    return net.arcs[arc_index].base_travel_hours * disruption.factor(net, arc_index, period);
  }
};

// Per planning season, the weighted scenario list.
struct ScenarioSet {
  std::vector<std::vector<Scenario>> seasons;

  int num_seasons() const { return static_cast<int>(seasons.size()); }

  void validate() const {
    for (int t = 0; t < num_seasons(); ++t) {
      double sum = 0.0;
      for (const auto& s : seasons[t]) {
        if (s.probability <= 0.0) throw ValidationError("scenario probabilities must be positive");
        sum += s.probability;
      }
      if (std::abs(sum - 1.0) > tol::probability)
        throw ValidationError("season " + std::to_string(t) +
                              " probabilities sum to " + std::to_string(sum));
    }
  }
};

// Weekly Poisson rates over the whole horizon. A season spans three calendar
// months; its periods map to those months in blocks of |T_t|/3 (the last
// block absorbs the remainder, e.g. 13 weeks -> 4,4,5), and the weekly rate
// in month k is annual_demand * share_k / 4.
inline std::vector<std::vector<double>> weekly_demand_rates(
    const std::vector<double>& annual_demand, const std::vector<double>& monthly_shares,
    const Horizon& horizon) {
  if (monthly_shares.size() != 12) throw ArgumentError("monthly_shares must have 12 entries");
  double share_sum = 0.0;
  for (double s : monthly_shares) {
    if (s < 0) throw ArgumentError("monthly shares must be non-negative");
    share_sum += s;
  }
  if (std::abs(share_sum - 1.0) > tol::probability)
    throw ArgumentError("monthly shares must sum to 1");
  for (double d : annual_demand)
    if (d < 0) throw ArgumentError("annual demands must be non-negative");
  horizon.validate();

  const int pps = horizon.periods_per_season;
  const int block = pps / 3;
  std::vector<std::vector<double>> rates(horizon.total_periods(),
                                         std::vector<double>(annual_demand.size(), 0.0));
  for (int p = 0; p < horizon.total_periods(); ++p) {
    int season = p / pps;
    int within = p % pps;
    int month_block = (block > 0) ? std::min(within / block, 2) : 2;
    int month = (season * 3 + month_block) % 12;
    for (std::size_t k = 0; k < annual_demand.size(); ++k)
      rates[p][k] = annual_demand[k] * monthly_shares[month] / 4.0;
  }
  return rates;
}

// n_scenarios independent demand realizations over the full horizon. Each
// scenario draws from its own stream derived from (seed, index), so the set
// is identical no matter how the loop is scheduled.
inline std::vector<DemandRealization> gen_demand_scenarios(
    const std::vector<std::vector<double>>& rates, int n_scenarios, std::uint64_t seed,
    int threads = 1) {
  if (n_scenarios < 1) throw ArgumentError("n_scenarios must be >= 1");
  std::vector<DemandRealization> out(n_scenarios);
  parallel_for(n_scenarios, threads, [&](int i) {
    Pcg32 rng = stream_rng(seed, stream_tag::demand, static_cast<std::uint64_t>(i));
    DemandRealization r;
    r.q.resize(rates.size());
    for (std::size_t p = 0; p < rates.size(); ++p) {
      r.q[p].resize(rates[p].size());
      for (std::size_t k = 0; k < rates[p].size(); ++k)
        r.q[p][k] = poisson_sample(rates[p][k], rng);
    }
    out[i] = std::move(r);
  });
  return out;
}

// Hub disruptions: per scenario and period, each hub goes down independently
// with probability `rate`.
inline std::vector<DisruptionRealization> gen_disruption_scenarios(
    const Network& net, double rate, double intensity, int n_scenarios, int periods,
    std::uint64_t seed, int threads = 1) {
  if (rate < 0.0 || rate > 1.0) throw ArgumentError("disruption rate must be in [0,1]");
  if (intensity < 1.0) throw ArgumentError("disruption intensity must be >= 1");
  if (n_scenarios < 1) throw ArgumentError("n_scenarios must be >= 1");
  if (periods < 0) throw ArgumentError("periods must be non-negative");
  const int hubs = net.num_hubs();
  std::vector<DisruptionRealization> out(n_scenarios);
  parallel_for(n_scenarios, threads, [&](int i) {
    Pcg32 rng = stream_rng(seed, stream_tag::disruption, static_cast<std::uint64_t>(i));
    DisruptionRealization r;
    r.intensity = intensity;
    r.disrupted.assign(periods, std::vector<char>(hubs, 0));
    for (int p = 0; p < periods; ++p)
      for (int h = 0; h < hubs; ++h)
        r.disrupted[p][h] = rate > 0.0 && rng.bernoulli(rate) ? 1 : 0;
    out[i] = std::move(r);
  });
  return out;
}

// Pairs demand and disruption realizations by index into full-horizon
// scenarios with uniform weights 1/N. This is the input shape scenario
// reduction works on.
inline std::vector<Scenario> make_scenarios(const std::vector<DemandRealization>& demands,
                                            const std::vector<DisruptionRealization>& disruptions) {
  if (demands.size() != disruptions.size())
    throw ArgumentError("demand and disruption realization counts differ");
  if (demands.empty()) throw ArgumentError("no realizations to assemble");
  const int n = static_cast<int>(demands.size());
  std::vector<Scenario> out(n);
  for (int i = 0; i < n; ++i) {
    if (demands[i].num_periods() != disruptions[i].num_periods())
      throw ArgumentError("demand and disruption horizons differ");
    out[i].probability = 1.0 / n;
    out[i].demand = demands[i];
    out[i].disruption = disruptions[i];
  }
  return out;
}

// Slices full-horizon scenarios into per-season lists, keeping each
// scenario's weight (so reduced sets carry their redistributed mass).
inline ScenarioSet split_seasons(const std::vector<Scenario>& scenarios, const Horizon& horizon) {
  if (scenarios.empty()) throw ArgumentError("no scenarios to split");
  horizon.validate();
  const int pps = horizon.periods_per_season;
  for (const auto& s : scenarios) {
    if (s.demand.num_periods() < horizon.total_periods())
      throw ArgumentError("demand realization does not cover the horizon");
    if (s.disruption.num_periods() < horizon.total_periods())
      throw ArgumentError("disruption realization does not cover the horizon");
  }
  const int n = static_cast<int>(scenarios.size());
  ScenarioSet set;
  set.seasons.resize(horizon.seasons);
  for (int t = 0; t < horizon.seasons; ++t) {
    set.seasons[t].resize(n);
    for (int i = 0; i < n; ++i) {
      const Scenario& src = scenarios[i];
      Scenario& s = set.seasons[t][i];
      s.probability = src.probability;
      s.demand.q.assign(src.demand.q.begin() + t * pps, src.demand.q.begin() + (t + 1) * pps);
      s.disruption.intensity = src.disruption.intensity;
      s.disruption.disrupted.assign(src.disruption.disrupted.begin() + t * pps,
                                    src.disruption.disrupted.begin() + (t + 1) * pps);
    }
  }
  set.validate();
  return set;
}

// Raw generated sets in one step: pair by index, uniform weights, slice.
inline ScenarioSet assemble_scenarios(const std::vector<DemandRealization>& demands,
                                      const std::vector<DisruptionRealization>& disruptions,
                                      const Horizon& horizon) {
  return split_seasons(make_scenarios(demands, disruptions), horizon);
}

}  // namespace relayplan
