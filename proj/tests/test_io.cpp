#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "relayplan/json_io.hpp"

using namespace relayplan;

namespace {

NetworkSpec sample_spec() {
  NetworkSpec spec;
  spec.nodes = {{1, NodeKind::Origin}, {11, NodeKind::Hub}, {12, NodeKind::Hub},
                {2, NodeKind::Destination}};
  spec.distances = {{0, 50, 75, 300}, {50, 0, 400, 50}, {75, 400, 0, 75}, {300, 50, 75, 0}};
  spec.od_pairs = {{1, 2, 123.25}};
  return spec;
}

}  // namespace

TEST_CASE("network specs round trip through json") {
  NetworkSpec spec = sample_spec();
  NetworkSpec back = network_spec_from_json(to_json(spec));
  REQUIRE(back.nodes.size() == 4);
  CHECK(back.nodes[0].id == 1);
  CHECK(back.nodes[0].kind == NodeKind::Origin);
  CHECK(back.nodes[1].kind == NodeKind::Hub);
  CHECK(back.nodes[3].kind == NodeKind::Destination);
  CHECK(back.distances == spec.distances);
  REQUIRE(back.od_pairs.size() == 1);
  CHECK(back.od_pairs[0].origin == 1);
  CHECK(back.od_pairs[0].dest == 2);
  CHECK(back.od_pairs[0].annual_demand == 123.25);
  CHECK(to_json(back) == to_json(spec));

  NetworkSpec coords;
  coords.nodes = {{1, NodeKind::Origin, 35.0, -101.0}, {11, NodeKind::Hub, 35.5, -97.0},
                  {2, NodeKind::Destination, 36.0, -94.0}};
  coords.od_pairs = {{1, 2, 10.0}};
  nlohmann::json j = to_json(coords);
  CHECK_FALSE(j.contains("distances"));
  NetworkSpec back2 = network_spec_from_json(j);
  CHECK(back2.distances.empty());
  CHECK(back2.nodes[1].lat == 35.5);
  CHECK(back2.nodes[1].lon == -97.0);
}

TEST_CASE("network json rejects surprises") {
  nlohmann::json good = to_json(sample_spec());

  nlohmann::json extra = good;
  extra["comment"] = "hi";
  CHECK_THROWS_AS(network_spec_from_json(extra), ParseError);

  nlohmann::json bad_node = good;
  bad_node["nodes"][0]["name"] = "amarillo";
  CHECK_THROWS_AS(network_spec_from_json(bad_node), ParseError);

  nlohmann::json missing = good;
  missing["nodes"][0].erase("lat");
  CHECK_THROWS_AS(network_spec_from_json(missing), ParseError);

  nlohmann::json bad_kind = good;
  bad_kind["nodes"][0]["kind"] = "depot";
  CHECK_THROWS_AS(network_spec_from_json(bad_kind), ParseError);

  nlohmann::json bad_od = good;
  bad_od["od_pairs"][0]["weight"] = 2;
  CHECK_THROWS_AS(network_spec_from_json(bad_od), ParseError);

  CHECK(node_kind_from_string("origin") == NodeKind::Origin);
  CHECK(node_kind_from_string("hub") == NodeKind::Hub);
  CHECK(node_kind_from_string("destination") == NodeKind::Destination);
  CHECK_THROWS_AS(node_kind_from_string("port"), ParseError);
}

TEST_CASE("an empty config file means the defaults") {
  RunConfig c = run_config_from_json(nlohmann::json::object());
  CHECK(c.horizon.seasons == 4);
  CHECK(c.horizon.periods_per_season == 13);
  CHECK(c.horizon.days_per_period == 7);
  CHECK(c.build.max_leg_hours == 5.5);
  CHECK(c.build.speed_mph == 50.0);
  CHECK_FALSE(c.build.allow_direct);
  const std::vector<double> levels = {0.0, 60.0, 120.0, 180.0};
  CHECK(c.capacity_levels == levels);
  CHECK(c.flow_unit_cost == 1.0);
  CHECK(c.extra_penalty_per_unit == 25.0);
  CHECK(c.operate_cost_per_unit == 40.0);
  CHECK(c.change_cost_per_unit == 10.0);
  CHECK(c.monthly_shares == std::vector<double>(12, 1.0 / 12.0));
  CHECK(c.scenario_count == 50);
  CHECK(c.reduce_to == 10);
  CHECK(c.disruption_rate == 0.05);
  CHECK(c.disruption_intensity == 1.5);
  CHECK(c.seed == 1);
  CHECK(c.mode == "dynamic");
  CHECK(c.method == "auto");
  CHECK(c.gap == 1e-6);
  CHECK(c.time_limit_seconds == 0.0);
  CHECK(c.threads == 1);
  CHECK(c.plan_mode() == PlanMode::Dynamic);
}

TEST_CASE("configs round trip and validate") {
  RunConfig c;
  c.horizon = {2, 5, 10};
  c.build.max_leg_hours = 4.0;
  c.build.speed_mph = 45.0;
  c.build.allow_direct = true;
  c.capacity_levels = {0.0, 10.0, 20.0};
  c.flow_unit_cost = 2.5;
  c.extra_penalty_per_unit = 7.0;
  c.operate_cost_per_unit = 3.0;
  c.change_cost_per_unit = 1.5;
  c.monthly_shares.assign(12, 0.05);
  c.monthly_shares[11] = 0.45;
  c.scenario_count = 9;
  c.reduce_to = 4;
  c.disruption_rate = 0.2;
  c.disruption_intensity = 2.5;
  c.seed = 77;
  c.mode = "static";
  c.method = "milp";
  c.gap = 1e-4;
  c.time_limit_seconds = 30.0;
  c.threads = 3;

  RunConfig back = run_config_from_json(to_json(c));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.seed == 77);
  CHECK(back.monthly_shares[11] == 0.45);
  CHECK(back.plan_mode() == PlanMode::Static);

  CostTable costs = back.cost_table(2);
  CHECK(costs.num_levels() == 3);
  CHECK(costs.capacity(0, 2) == 20.0);
  CHECK(costs.flow_unit_cost == 2.5);
  CHECK(costs.extra_penalty[1] == 7.0);

  nlohmann::json partial = {{"horizon", {{"seasons", 2}}}};
  RunConfig p = run_config_from_json(partial);
  CHECK(p.horizon.seasons == 2);
  CHECK(p.horizon.periods_per_season == 13);

  nlohmann::json unknown_top = to_json(c);
  unknown_top["tuning"] = 1;
  CHECK_THROWS_AS(run_config_from_json(unknown_top), ParseError);
  nlohmann::json unknown_solve = to_json(c);
  unknown_solve["solve"]["verbosity"] = 3;
  CHECK_THROWS_AS(run_config_from_json(unknown_solve), ParseError);
  nlohmann::json unknown_costs = to_json(c);
  unknown_costs["costs"]["discount"] = 0.9;
  CHECK_THROWS_AS(run_config_from_json(unknown_costs), ParseError);

  RunConfig odd;
  odd.mode = "hybrid";
  CHECK_THROWS_AS(odd.plan_mode(), ArgumentError);
}

TEST_CASE("scenario files round trip through json") {
  std::vector<Scenario> scenarios(2);
  scenarios[0].probability = 0.3;
  scenarios[0].disruption.intensity = 1.5;
  scenarios[0].demand.q = {{1, 2}, {3, 4}};
  scenarios[0].disruption.disrupted = {{1, 0}, {0, 1}};
  scenarios[1].probability = 0.7;
  scenarios[1].disruption.intensity = 1.5;
  scenarios[1].demand.q = {{5, 6}, {7, 8}};
  scenarios[1].disruption.disrupted = {{0, 0}, {0, 0}};

  std::vector<Scenario> back = scenarios_from_json(to_json(scenarios));
  REQUIRE(back.size() == 2);
  CHECK(back[0].probability == 0.3);
  CHECK(back[0].disruption.intensity == 1.5);
  CHECK(back[0].demand.q == scenarios[0].demand.q);
  CHECK(back[0].disruption.disrupted == scenarios[0].disruption.disrupted);
  CHECK(back[1].demand.q[1][0] == 7);

  nlohmann::json j = to_json(scenarios);
  nlohmann::json bad_flag = j;
  bad_flag["scenarios"][0]["disrupted"][0][0] = 2;
  CHECK_THROWS_AS(scenarios_from_json(bad_flag), ParseError);

  nlohmann::json mismatch = j;
  mismatch["scenarios"][0]["demand"] = {{1, 2}};
  CHECK_THROWS_AS(scenarios_from_json(mismatch), ParseError);

  nlohmann::json unknown = j;
  unknown["scenarios"][0]["label"] = "base";
  CHECK_THROWS_AS(scenarios_from_json(unknown), ParseError);

  nlohmann::json empty;
  empty["scenarios"] = nlohmann::json::array();
  CHECK_THROWS_AS(scenarios_from_json(empty), ParseError);
}

TEST_CASE("plans round trip through json") {
  CostTable costs = CostTable::uniform(2, {0.0, 60.0, 120.0}, 1.0, 25.0, 40.0, 10.0);
  CapacityPlan plan(2, 3);
  plan.set_level(0, 0, 1);
  plan.set_level(0, 1, 2);
  plan.set_level(1, 2, 1);

  nlohmann::json j = plan_to_json(plan, costs);
  CHECK(j["levels"][0][1] == 2);
  CHECK(j["capacities"][0][1] == 120.0);
  CHECK(j["capacities"][1][0] == 0.0);

  CapacityPlan back = plan_from_json(j);
  CHECK(back.num_hubs() == 2);
  CHECK(back.num_seasons() == 3);
  for (int h = 0; h < 2; ++h)
    for (int t = 0; t < 3; ++t) CHECK(back.level(h, t) == plan.level(h, t));

  nlohmann::json ragged;
  ragged["levels"] = {{0, 1}, {1}};
  CHECK_THROWS_AS(plan_from_json(ragged), ParseError);
  nlohmann::json hollow;
  hollow["levels"] = nlohmann::json::array();
  CHECK_THROWS_AS(plan_from_json(hollow), ParseError);
  nlohmann::json keyless = nlohmann::json::object();
  CHECK_THROWS_AS(plan_from_json(keyless), ParseError);
}

TEST_CASE("solutions serialize without wall clock noise") {
  NetworkSpec spec = sample_spec();
  Network net = build_relay_network(spec, {5.5, 50.0, false});
  Horizon hz{1, 1, 1};
  CostTable costs = CostTable::uniform(2, {0.0, 1.0}, 1.0, 0.5, 0.1, 0.0);
  ScenarioSet set;
  set.seasons.resize(1);
  {
    Scenario s;
    s.probability = 1.0;
    s.demand.q = {{2}};
    s.disruption.disrupted = {{0, 0}};
    set.seasons[0] = {s};
  }

  PlanResult res = optimize_plan(net, hz, costs, set, PlanMode::Dynamic);
  nlohmann::json j = solution_to_json(res, costs);
  CHECK(j["mode"] == "static");
  CHECK(j["method"] == "decomposition");
  CHECK_THAT(j["objective"].get<double>(), Catch::Matchers::WithinAbs(4.6, 1e-9));
  CHECK(j["plan"]["levels"][0][0] == 1);
  CHECK(j["plan"]["levels"][1][0] == 0);
  CHECK(j["plan"]["capacities"][0][0] == 1.0);
  CHECK_FALSE(j.contains("wall_seconds"));

  PlanResult res2 = optimize_plan(net, hz, costs, set, PlanMode::Dynamic);
  CHECK(solution_to_json(res2, costs).dump(2) == j.dump(2));
}

TEST_CASE("reports and comparisons serialize field for field") {
  PlanReport rep;
  rep.mode = "static";
  rep.total_cost = 18.0;
  rep.co2_metric_tons = 0.25;
  nlohmann::json j = report_to_json(rep);
  CHECK(j.size() == 17);
  CHECK(j["mode"] == "static");
  CHECK(j["total_cost"] == 18.0);
  CHECK(j["co2_metric_tons"] == 0.25);

  PlanReport other = rep;
  other.total_cost = 20.5;
  std::vector<LabeledReport> runs = {{"base", rep}, {"alt", other}};
  nlohmann::json cmp = compare_to_json(runs);
  CHECK(cmp["runs"]["base"]["total_cost"] == 18.0);
  CHECK(cmp["runs"]["alt"]["total_cost"] == 20.5);
  CHECK(cmp["deltas"]["alt_minus_base"]["total_cost"] == 2.5);

  std::vector<LabeledReport> none;
  CHECK_THROWS_AS(compare_to_json(none), ArgumentError);
}

TEST_CASE("reduction tables print slot by slot") {
  ReductionResult red;
  red.selected = {2, 0};
  red.probability = {0.75, 0.25};
  red.distance = 0.5;
  std::string expected =
      "slot,original_index,probability,subset_distance\n"
      "0,2,0.75,0.5\n"
      "1,0,0.25,0.5\n";
  CHECK(reduction_to_csv(red) == expected);
}

TEST_CASE("text files read back what was written") {
  const std::string path = "io_tmp_roundtrip.json";
  write_text_file(path, "{\"k\": 1}\n");
  CHECK(read_text_file(path) == "{\"k\": 1}\n");
  CHECK(load_json_file(path)["k"] == 1);
  std::remove(path.c_str());

  CHECK_THROWS_AS(read_text_file("no_such_file_here.json"), ParseError);
  CHECK_THROWS_AS(write_text_file("no_such_dir_here/out.txt", "x"), ArgumentError);
  CHECK_THROWS_AS(parse_json("{truncated", "config"), ParseError);
  try {
    parse_json("{truncated", "config");
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("config: ", 0) == 0);
  }
}

TEST_CASE("demand tables parse line by line") {
  std::istringstream good("origin,dest,annual_demand\n1,2,3.5\n\n7,9,100\n");
  std::vector<OdPair> ods = read_demand_csv(good);
  REQUIRE(ods.size() == 2);
  CHECK(ods[0].origin == 1);
  CHECK(ods[0].dest == 2);
  CHECK(ods[0].annual_demand == 3.5);
  CHECK(ods[1].dest == 9);

  std::istringstream headerless("1,2,3.5\r\n");
  CHECK(read_demand_csv(headerless).size() == 1);

  std::istringstream bogus("origin,dest,annual_demand\n1,2,3.5\nbogus\n");
  try {
    read_demand_csv(bogus);
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(std::string(e.what()).find("(line 3)") != std::string::npos);
  }

  std::istringstream trailing("1,2,3.5,9\n");
  CHECK_THROWS_AS(read_demand_csv(trailing), ParseError);
  std::istringstream blank("");
  CHECK_THROWS_AS(read_demand_csv(blank), ParseError);
}

TEST_CASE("monthly shares parse month by month") {
  std::string text = "month,share\n";
  for (int m = 1; m <= 11; ++m) text += std::to_string(m) + ",0.05\n";
  text += "12,0.45\n";
  std::istringstream good(text);
  std::vector<double> shares = read_monthly_shares_csv(good);
  REQUIRE(shares.size() == 12);
  CHECK(shares[0] == 0.05);
  CHECK(shares[11] == 0.45);

  std::istringstream shuffled("12,0.45\n" + std::string("1,0.55\n"));
  // Months may arrive in any order as long as each shows up once; the
  // incomplete tail is the error here.
  CHECK_THROWS_AS(read_monthly_shares_csv(shuffled), ParseError);

  std::istringstream dup("1,0.1\n1,0.2\n");
  try {
    read_monthly_shares_csv(dup);
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("twice") != std::string::npos);
  }

  std::istringstream range("13,0.1\n");
  CHECK_THROWS_AS(read_monthly_shares_csv(range), ParseError);
  std::istringstream numeric("1,x\n");
  CHECK_THROWS_AS(read_monthly_shares_csv(numeric), ParseError);

  std::string missing_text;
  for (int m = 1; m <= 11; ++m) missing_text += std::to_string(m) + ",0.05\n";
  std::istringstream missing(missing_text);
  try {
    read_monthly_shares_csv(missing);
    FAIL("expected a parse failure");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("month 12 missing") != std::string::npos);
  }
}
