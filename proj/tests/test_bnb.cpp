#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "relayplan/branch_bound.hpp"
#include "relayplan/rng.hpp"

using namespace relayplan;

namespace {

// Exhaustive reference over all assignments of the binary columns. Continuous
// columns are not supported here; the random instances below are pure binary.
double brute_force_binary(const MilpInstance& inst) {
  const int n = inst.num_cols();
  double best = kInf;
  std::vector<double> x(n, 0.0);
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    for (int j = 0; j < n; ++j) x[j] = (mask >> j) & 1 ? 1.0 : 0.0;
    bool ok = true;
    for (int j = 0; j < n && ok; ++j) ok = x[j] >= inst.lb[j] - 1e-12 && x[j] <= inst.ub[j] + 1e-12;
    if (!ok) continue;
    if (inst.max_violation(x) > 1e-9) continue;
    best = std::min(best, inst.objective_value(x));
  }
  return best;
}

MilpInstance knapsack(const std::vector<double>& value, const std::vector<double>& weight,
                      double cap) {
  MilpInstance inst;
  inst.add_row(RowSense::LE, cap);
  for (std::size_t i = 0; i < value.size(); ++i)
    inst.add_column(-value[i], 0.0, 1.0, true, {{0, weight[i]}});
  return inst;
}

MilpInstance random_binary_milp(Pcg32& rng) {
  MilpInstance inst;
  int m = 1 + static_cast<int>(rng.next_double() * 4);
  int n = 3 + static_cast<int>(rng.next_double() * 7);
  for (int r = 0; r < m; ++r) {
    double u = rng.next_double();
    RowSense s = u < 0.55 ? RowSense::LE : (u < 0.85 ? RowSense::GE : RowSense::EQ);
    double b = s == RowSense::GE ? rng.next_double() * 2.0 : rng.next_double() * 4.0;
    if (s == RowSense::EQ) b = std::floor(rng.next_double() * 3.0);
    inst.add_row(s, b);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> entries;
    for (int r = 0; r < m; ++r)
      if (rng.next_double() < 0.7) entries.push_back({r, std::floor(rng.next_double() * 3.0) - 1.0});
    inst.add_column(-3.0 + 6.0 * rng.next_double(), 0.0, 1.0, true, entries);
  }
  return inst;
}

}  // namespace

TEST_CASE("knapsack agrees with pattern enumeration") {
  MilpInstance inst = knapsack({10, 13, 7, 8, 4, 9}, {3, 4, 2, 3, 1, 3}, 7.0);
  double ref = brute_force_binary(inst);
  BnbResult res = solve_milp(inst);
  REQUIRE(res.status == MilpStatus::Optimal);
  REQUIRE(res.has_incumbent);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(ref, 1e-9));
  CHECK(res.gap <= 1e-6);
  CHECK(res.bound <= res.objective + 1e-9);
  REQUIRE(res.x.size() == 6);
  double act = 0.0, val = 0.0;
  for (int j = 0; j < 6; ++j) {
    CHECK(std::abs(res.x[j] - std::round(res.x[j])) < 1e-9);
    act += inst.value[inst.col_start[j]] * res.x[j];
    val += inst.obj[j] * res.x[j];
  }
  CHECK(act <= 7.0 + 1e-9);
  CHECK_THAT(val, Catch::Matchers::WithinAbs(res.objective, 1e-9));
}

TEST_CASE("random binary programs agree with enumeration") {
  Pcg32 rng(271828, 5);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 60; ++trial) {
    MilpInstance inst = random_binary_milp(rng);
    double ref = brute_force_binary(inst);
    BnbResult res = solve_milp(inst);
    INFO("trial " << trial << " rows " << inst.num_rows() << " cols " << inst.num_cols());
    if (std::isinf(ref)) {
      REQUIRE(res.status == MilpStatus::Infeasible);
      CHECK_FALSE(res.has_incumbent);
      ++infeasible_seen;
      continue;
    }
    REQUIRE(res.status == MilpStatus::Optimal);
    REQUIRE_THAT(res.objective, Catch::Matchers::WithinAbs(ref, 1e-6 * (1.0 + std::abs(ref))));
    REQUIRE(inst.max_violation(res.x) < 1e-6);
    ++optimal_seen;
  }
  CHECK(optimal_seen >= 25);
  CHECK(infeasible_seen >= 5);
}

TEST_CASE("fixed-charge coupling of binary and continuous columns") {
  MilpInstance inst;
  inst.add_row(RowSense::LE, 0.0);
  inst.add_column(-2.0, 0.0, kInf, false, {{0, 1.0}});   // x <= 2y
  inst.add_column(3.0, 0.0, 1.0, true, {{0, -2.0}});
  BnbResult res = solve_milp(inst);
  REQUIRE(res.status == MilpStatus::Optimal);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
  CHECK_THAT(res.x[0], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(res.x[1], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("binary demands beyond reach are infeasible") {
  MilpInstance inst;
  inst.add_row(RowSense::GE, 3.0);
  inst.add_column(1.0, 0.0, 1.0, true, {{0, 1.0}});
  inst.add_column(1.0, 0.0, 1.0, true, {{0, 1.0}});
  BnbResult res = solve_milp(inst);
  CHECK(res.status == MilpStatus::Infeasible);
  CHECK_FALSE(res.has_incumbent);
}

TEST_CASE("fixed columns are folded before the search") {
  MilpInstance inst;
  inst.add_row(RowSense::GE, 2.0);
  inst.add_column(1.0, 1.0, 1.0, true, {{0, 1.0}});
  inst.add_column(2.0, 0.0, 1.0, true, {{0, 1.0}});
  BnbResult res = solve_milp(inst);
  REQUIRE(res.status == MilpStatus::Optimal);
  CHECK_THAT(res.objective, Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK(res.x[0] == 1.0);
  CHECK(res.x[1] == 1.0);
}

TEST_CASE("node and time limits stop the search") {
  MilpInstance inst = knapsack({10, 13, 7, 8, 4, 9, 11, 6}, {3, 4, 2, 3, 1, 3, 4, 2}, 9.0);
  BnbOptions opt;
  opt.max_nodes = 1;
  BnbResult res = solve_milp(inst, opt);
  CHECK(res.status == MilpStatus::NodeLimit);
  CHECK(res.nodes <= 1);

  BnbOptions topt;
  topt.time_limit_seconds = 0.0;
  BnbResult tres = solve_milp(inst, topt);
  CHECK(tres.status == MilpStatus::TimeLimit);
}

TEST_CASE("incumbent callback and log stream fire") {
  MilpInstance inst = knapsack({5, 6, 4}, {2, 3, 1}, 4.0);
  BnbOptions opt;
  int incumbents = 0;
  double worst_audit = 0.0;
  opt.on_incumbent = [&](const std::vector<double>& x, double obj) {
    ++incumbents;
    worst_audit = std::max(worst_audit, inst.max_violation(x));
    CHECK(std::isfinite(obj));
  };
  std::vector<std::string> lines;
  opt.log = [&](const std::string& s) { lines.push_back(s); };
  BnbResult res = solve_milp(inst, opt);
  REQUIRE(res.status == MilpStatus::Optimal);
  CHECK(incumbents >= 1);
  CHECK(worst_audit < 1e-6);
  REQUIRE_FALSE(lines.empty());
  for (const auto& s : lines) CHECK(s.rfind("BNB ", 0) == 0);
}
