#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relayplan/reduction.hpp"

using namespace relayplan;

namespace {

std::vector<std::vector<double>> line_costs(const std::vector<double>& pos) {
  int n = static_cast<int>(pos.size());
  std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c[i][j] = std::abs(pos[i] - pos[j]);
  return c;
}

Network two_leg_net() {
  NetworkSpec spec;
  spec.nodes = {{1, NodeKind::Origin}, {10, NodeKind::Hub}, {2, NodeKind::Destination}};
  spec.distances = {{0, 100, 200}, {100, 0, 100}, {200, 100, 0}};
  spec.od_pairs = {{1, 2, 100}};
  return build_relay_network(spec, {5.5, 50.0, false});
}

Scenario point_scenario(std::int64_t q, bool hub_down, double intensity = 1.5) {
  Scenario s;
  s.demand.q = {{q}};
  s.disruption.intensity = intensity;
  s.disruption.disrupted = {{static_cast<char>(hub_down ? 1 : 0)}};
  return s;
}

}  // namespace

TEST_CASE("single representative of a skewed line") {
  auto cost = line_costs({0.0, 1.0, 10.0});
  std::vector<double> prob(3, 1.0 / 3.0);
  ReductionResult r = ffs_reduce(cost, prob, 1);
  REQUIRE(r.selected == std::vector<int>{1});
  CHECK_THAT(r.distance, Catch::Matchers::WithinAbs(10.0 / 3.0, 1e-12));
  CHECK_THAT(r.probability[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(r.assigned_to == std::vector<int>{0, 0, 0});
  CHECK_THAT(kantorovich_subset_distance(cost, prob, r.selected),
             Catch::Matchers::WithinAbs(r.distance, 1e-12));
}

TEST_CASE("selection distance is monotone in the subset size") {
  auto cost = line_costs({0.0, 0.7, 1.9, 4.0, 4.2, 9.0, 12.5, 13.0});
  std::vector<double> prob(8, 1.0 / 8.0);
  double prev = kInf;
  for (int k = 1; k <= 8; ++k) {
    ReductionResult r = ffs_reduce(cost, prob, k);
    CHECK(r.distance <= prev + 1e-12);
    CHECK(static_cast<int>(r.selected.size()) == k);
    double mass = 0.0;
    for (double p : r.probability) mass += p;
    CHECK_THAT(mass, Catch::Matchers::WithinAbs(1.0, 1e-12));
    CHECK_THAT(kantorovich_subset_distance(cost, prob, r.selected),
               Catch::Matchers::WithinAbs(r.distance, 1e-12));
    prev = r.distance;
  }
  ReductionResult full = ffs_reduce(cost, prob, 8);
  CHECK(full.distance == 0.0);
  CHECK(full.probability == prob);
}

TEST_CASE("equidistant mass redistributes to the lowest kept index") {
  std::vector<std::vector<double>> cost = {{0.0, 10.0, 0.1, 5.0},
                                           {10.0, 0.0, 9.0, 5.0},
                                           {0.1, 9.0, 0.0, 6.0},
                                           {5.0, 5.0, 6.0, 0.0}};
  std::vector<double> prob(4, 0.25);
  ReductionResult r = ffs_reduce(cost, prob, 2);
  REQUIRE(r.selected == std::vector<int>{0, 1});
  // Scenario 3 sits 5.0 from both kept scenarios; the tie goes to index 0.
  CHECK(r.assigned_to == std::vector<int>{0, 1, 0, 0});
  CHECK_THAT(r.probability[0], Catch::Matchers::WithinAbs(0.75, 1e-12));
  CHECK_THAT(r.probability[1], Catch::Matchers::WithinAbs(0.25, 1e-12));
  CHECK_THAT(r.distance, Catch::Matchers::WithinAbs(0.25 * 0.1 + 0.25 * 5.0, 1e-12));
}

TEST_CASE("subset distance equals the optimal transport cost") {
  auto cost = line_costs({0.0, 1.0, 3.5, 6.0, 7.25});
  std::vector<double> prob = {0.1, 0.3, 0.2, 0.25, 0.15};
  for (int k = 1; k <= 4; ++k) {
    ReductionResult r = ffs_reduce(cost, prob, k);
    std::vector<double> target(prob.size(), 0.0);
    for (std::size_t s = 0; s < r.selected.size(); ++s) target[r.selected[s]] = r.probability[s];
    double lp = transport_distance(cost, prob, target);
    CHECK_THAT(lp, Catch::Matchers::WithinAbs(r.distance, 1e-8));
  }
}

TEST_CASE("transport cost closed forms") {
  std::vector<std::vector<double>> cost = {{0.0, 4.0}, {4.0, 0.0}};
  CHECK_THAT(transport_distance(cost, {1.0, 0.0}, {0.0, 1.0}),
             Catch::Matchers::WithinAbs(4.0, 1e-9));
  CHECK_THAT(transport_distance(cost, {0.5, 0.5}, {1.0, 0.0}),
             Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(transport_distance(cost, {0.5, 0.5}, {0.5, 0.5}),
             Catch::Matchers::WithinAbs(0.0, 1e-9));
  std::vector<double> heavy{0.9, 0.2};
  CHECK_THROWS_AS(transport_distance(cost, heavy, {0.5, 0.5}), ArgumentError);
}

TEST_CASE("scenario distance combines demand and travel-time gaps") {
  Network net = two_leg_net();
  Scenario calm = point_scenario(5, false);
  Scenario rough = point_scenario(7, true);
  // Demand gap 2; both arcs touch the hub and stretch from 2 h to 3 h.
  double expect = std::sqrt(4.0 + 2.0);
  CHECK_THAT(scenario_distance(net, calm, rough), Catch::Matchers::WithinAbs(expect, 1e-12));
  CHECK(scenario_distance(net, calm, calm) == 0.0);

  GroundMetricWeights w{0.5, 2.0};
  double weighted = std::sqrt(0.25 * 4.0 + 4.0 * 2.0);
  CHECK_THAT(scenario_distance(net, calm, rough, w), Catch::Matchers::WithinAbs(weighted, 1e-12));

  Scenario longer;
  longer.demand.q = {{5}, {5}};
  longer.disruption.disrupted = {{0}, {0}};
  CHECK_THROWS_AS(scenario_distance(net, calm, longer), ArgumentError);
}

TEST_CASE("default weights are reciprocal component spreads") {
  Network net = two_leg_net();
  std::vector<Scenario> scen = {point_scenario(0, false), point_scenario(4, false)};
  GroundMetricWeights w = default_metric_weights(net, scen);
  // Demand values 0 and 4: sigma 2. No disruption: flat times fall back to 1.
  CHECK_THAT(w.demand, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(w.time, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THROWS_AS(default_metric_weights(net, {}), ArgumentError);
}

TEST_CASE("distance matrices are symmetric and schedule invariant") {
  Network net = two_leg_net();
  std::vector<Scenario> scen;
  for (int i = 0; i < 7; ++i) scen.push_back(point_scenario(i * 2, i % 2 == 0));
  auto serial = distance_matrix(net, scen, {}, 1);
  auto threaded = distance_matrix(net, scen, {}, 3);
  REQUIRE(serial == threaded);
  for (std::size_t i = 0; i < scen.size(); ++i) {
    CHECK(serial[i][i] == 0.0);
    for (std::size_t j = 0; j < scen.size(); ++j) CHECK(serial[i][j] == serial[j][i]);
  }
}

TEST_CASE("reduction input validation") {
  auto cost = line_costs({0.0, 1.0});
  CHECK_THROWS_AS(ffs_reduce(cost, {0.5, 0.5}, 0), ArgumentError);
  CHECK_THROWS_AS(ffs_reduce(cost, {0.7, 0.5}, 1), ValidationError);
  std::vector<double> neg{1.5, -0.5};
  CHECK_THROWS_AS(ffs_reduce(cost, neg, 1), ValidationError);
  auto narrow = line_costs({0.0});
  CHECK_THROWS_AS(ffs_reduce(narrow, {0.5, 0.5}, 1), ArgumentError);
}
