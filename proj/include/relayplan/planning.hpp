#pragma once

// Planning-horizon structure and the cost/capacity parameter tables shared by
// the model builder, the evaluator, and the reports.

#include <string>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/network.hpp"

namespace relayplan {

struct Horizon {
  int seasons = 4;
  int periods_per_season = 13;
  int days_per_period = 7;

  int total_periods() const { return seasons * periods_per_season; }

  void validate() const {
    if (seasons < 1 || periods_per_season < 1 || days_per_period < 1)
      throw ArgumentError("horizon counts must all be >= 1");
  }
};

// Capacity levels are shared across hubs as a ladder of daily throughput
// values; level 0 is always present with zero capacity so "not contracted"
// is representable. hub_cost[h][l1][l2] covers both the change l1->l2 and a
// season of operation at l2.
class CostTable {
 public:
  double flow_unit_cost = 1.0;                          // $ per unit per hour
  std::vector<double> extra_penalty;                    // per hub, $ per unit extra daily capacity
  std::vector<std::vector<double>> level_capacity;      // [hub][level], units per day
  std::vector<std::vector<std::vector<double>>> hub_cost;  // [hub][l1][l2], $ per season

  int num_hubs() const { return static_cast<int>(level_capacity.size()); }
  int num_levels() const {
    return level_capacity.empty() ? 0 : static_cast<int>(level_capacity[0].size());
  }

  double capacity(int hub, int level) const { return level_capacity[hub][level]; }
  double max_capacity(int hub) const { return level_capacity[hub].back(); }
  double transition_cost(int hub, int from_level, int to_level) const {
    return hub_cost[hub][from_level][to_level];
  }

  void validate(int expected_hubs) const {
    if (num_hubs() != expected_hubs)
      throw ConstructionError("cost table covers " + std::to_string(num_hubs()) +
                              " hubs, network has " + std::to_string(expected_hubs));
    if (num_levels() < 1) throw ConstructionError("cost table has no capacity levels");
    if (static_cast<int>(extra_penalty.size()) != num_hubs())
      throw ConstructionError("extra_penalty must list one cost per hub");
    if (flow_unit_cost < 0) throw ConstructionError("flow_unit_cost must be non-negative");
    const int L = num_levels();
    for (int h = 0; h < num_hubs(); ++h) {
      if (static_cast<int>(level_capacity[h].size()) != L)
        throw ConstructionError("hub " + std::to_string(h) + " has a ragged level ladder");
      if (level_capacity[h][0] != 0.0)
        throw ConstructionError("level 0 must have zero capacity (hub " + std::to_string(h) + ")");
      for (int l = 0; l + 1 < L; ++l)
        if (level_capacity[h][l] > level_capacity[h][l + 1])
          throw ConstructionError("level capacities must be non-decreasing (hub " +
                                  std::to_string(h) + ")");
      if (static_cast<int>(hub_cost[h].size()) != L)
        throw ConstructionError("hub_cost table missing rows for hub " + std::to_string(h));
      for (int l1 = 0; l1 < L; ++l1) {
        if (static_cast<int>(hub_cost[h][l1].size()) != L)
          throw ConstructionError("hub_cost table missing entries for hub " + std::to_string(h));
        for (int l2 = 0; l2 < L; ++l2)
          if (hub_cost[h][l1][l2] < 0)
            throw ConstructionError("hub costs must be non-negative");
      }
      if (extra_penalty[h] < 0) throw ConstructionError("extra penalties must be non-negative");
    }
  }

  // Uniform ladder shared by every hub: operating cost proportional to the
  // level capacity plus a change cost proportional to the capacity delta.
  static CostTable uniform(int hubs, std::vector<double> levels, double flow_cost,
                           double extra_penalty_per_unit, double operate_cost_per_unit,
                           double change_cost_per_unit) {
    CostTable t;
    t.flow_unit_cost = flow_cost;
    t.extra_penalty.assign(hubs, extra_penalty_per_unit);
    t.level_capacity.assign(hubs, levels);
    const int L = static_cast<int>(levels.size());
    t.hub_cost.assign(hubs, std::vector<std::vector<double>>(L, std::vector<double>(L, 0.0)));
    for (int h = 0; h < hubs; ++h)
      for (int l1 = 0; l1 < L; ++l1)
        for (int l2 = 0; l2 < L; ++l2)
          t.hub_cost[h][l1][l2] = operate_cost_per_unit * levels[l2] +
                                  change_cost_per_unit * std::abs(levels[l2] - levels[l1]);
    return t;
  }
};

// First-stage solution: the contracted capacity level per hub per season.
// Transitions are implied by consecutive levels, starting from level 0.
class CapacityPlan {
 public:
  CapacityPlan() = default;
  CapacityPlan(int hubs, int seasons) : hubs_(hubs), seasons_(seasons), level_(hubs * seasons, 0) {}

  int num_hubs() const { return hubs_; }
  int num_seasons() const { return seasons_; }

  int level(int hub, int season) const { return level_[hub * seasons_ + season]; }
  void set_level(int hub, int season, int level) { level_[hub * seasons_ + season] = level; }
  int from_level(int hub, int season) const {
    return season == 0 ? 0 : level(hub, season - 1);
  }

  double contracted_capacity(const CostTable& costs, int hub, int season) const {
    return costs.capacity(hub, level(hub, season));
  }

  // Total first-stage cost: every season pays the transition from the
  // previous season's level (level 0 before the horizon starts).
  double hub_cost(const CostTable& costs) const {
    double total = 0.0;
    for (int h = 0; h < hubs_; ++h)
      for (int t = 0; t < seasons_; ++t)
        total += costs.transition_cost(h, from_level(h, t), level(h, t));
    return total;
  }

  bool is_static() const {
    for (int h = 0; h < hubs_; ++h)
      for (int t = 1; t < seasons_; ++t)
        if (level(h, t) != level(h, 0)) return false;
    return true;
  }

  bool operator==(const CapacityPlan& o) const {
    return hubs_ == o.hubs_ && seasons_ == o.seasons_ && level_ == o.level_;
  }
  // Lexicographic order over the level vector; used for deterministic
  // tie-breaking between equally priced plans.
  bool operator<(const CapacityPlan& o) const { return level_ < o.level_; }

  const std::vector<int>& raw_levels() const { return level_; }

 private:
  int hubs_ = 0;
  int seasons_ = 0;
  std::vector<int> level_;
};

enum class PlanMode : char { Dynamic, Static };

inline const char* to_string(PlanMode m) {
  return m == PlanMode::Dynamic ? "dynamic" : "static";
}

}  // namespace relayplan
