#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "relayplan/rng.hpp"
#include "relayplan/simplex.hpp"

using namespace relayplan;

namespace {

// Reference solver: converts to standard form (equalities over x >= 0 by
// adding one slack per inequality), enumerates every basis, and takes the
// best feasible basic solution. Finite upper bounds become explicit rows so
// the standard form keeps plain non-negativity.
struct StdForm {
  int m = 0, n = 0;
  std::vector<std::vector<double>> a;  // m x n dense
  std::vector<double> b, c;
};

StdForm to_standard_form(const MilpInstance& inst) {
  StdForm sf;
  int rows = inst.num_rows();
  int extra = 0;
  for (int j = 0; j < inst.num_cols(); ++j)
    if (std::isfinite(inst.ub[j])) ++extra;
  sf.m = rows + extra;
  std::vector<std::vector<double>> dense(sf.m, std::vector<double>(inst.num_cols(), 0.0));
  for (int j = 0; j < inst.num_cols(); ++j)
    for (std::int64_t k = inst.col_start[j]; k < inst.col_start[j + 1]; ++k)
      dense[inst.row_index[k]][j] = inst.value[k];
  sf.b.assign(sf.m, 0.0);
  for (int r = 0; r < rows; ++r) sf.b[r] = inst.rhs[r];
  int er = rows;
  for (int j = 0; j < inst.num_cols(); ++j) {
    if (!std::isfinite(inst.ub[j])) continue;
    dense[er][j] = 1.0;
    sf.b[er] = inst.ub[j];
    ++er;
  }
  sf.a = dense;
  sf.c.assign(inst.obj.begin(), inst.obj.end());
  sf.n = inst.num_cols();
  auto add_slack = [&](int row, double sign) {
    for (int r = 0; r < sf.m; ++r) sf.a[r].push_back(r == row ? sign : 0.0);
    sf.c.push_back(0.0);
    ++sf.n;
  };
  for (int r = 0; r < rows; ++r) {
    if (inst.sense[r] == RowSense::LE) add_slack(r, 1.0);
    if (inst.sense[r] == RowSense::GE) add_slack(r, -1.0);
  }
  for (int r = rows; r < sf.m; ++r) add_slack(r, 1.0);  // upper-bound rows
  return sf;
}

// Minimum over all feasible bases, or +inf when none is feasible. Valid for
// instances with x >= 0 and costs that keep the optimum finite.
double brute_force_lp(const MilpInstance& inst) {
  StdForm sf = to_standard_form(inst);
  const int m = sf.m, n = sf.n;
  // More equalities than columns: a random continuous rhs is almost surely
  // outside the column span, so no basic solution exists.
  if (n < m) return kInf;
  std::vector<int> pick(m);
  for (int i = 0; i < m; ++i) pick[i] = i;
  double best = kInf;
  std::vector<std::vector<double>> work(m, std::vector<double>(m + 1));
  while (true) {
    // Solve B xB = b by Gaussian elimination with partial pivoting.
    for (int r = 0; r < m; ++r) {
      for (int i = 0; i < m; ++i) work[r][i] = sf.a[r][pick[i]];
      work[r][m] = sf.b[r];
    }
    bool singular = false;
    for (int k = 0; k < m && !singular; ++k) {
      int p = k;
      for (int r = k + 1; r < m; ++r)
        if (std::abs(work[r][k]) > std::abs(work[p][k])) p = r;
      if (std::abs(work[p][k]) < 1e-9) {
        singular = true;
        break;
      }
      std::swap(work[k], work[p]);
      for (int r = k + 1; r < m; ++r) {
        double f = work[r][k] / work[k][k];
        if (f == 0.0) continue;
        for (int cc = k; cc <= m; ++cc) work[r][cc] -= f * work[k][cc];
      }
    }
    if (!singular) {
      std::vector<double> xb(m);
      bool ok = true;
      for (int k = m - 1; k >= 0; --k) {
        double s = work[k][m];
        for (int cc = k + 1; cc < m; ++cc) s -= work[k][cc] * xb[cc];
        xb[k] = s / work[k][k];
        if (xb[k] < -1e-9) ok = false;
      }
      if (ok) {
        double v = inst.obj_offset;
        for (int i = 0; i < m; ++i) v += sf.c[pick[i]] * xb[i];
        best = std::min(best, v);
      }
    }
    // Next combination in lexicographic order.
    int i = m - 1;
    while (i >= 0 && pick[i] == n - m + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < m; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

// Lagrangian bound from the returned duals; equals the optimum when the
// duals are correct, and never exceeds it.
double dual_bound(const MilpInstance& inst, const LpSolution& sol) {
  double g = inst.obj_offset;
  for (int r = 0; r < inst.num_rows(); ++r) g += sol.duals[r] * inst.rhs[r];
  std::vector<double> rc(inst.obj.begin(), inst.obj.end());
  for (int j = 0; j < inst.num_cols(); ++j)
    for (std::int64_t k = inst.col_start[j]; k < inst.col_start[j + 1]; ++k)
      rc[j] -= sol.duals[inst.row_index[k]] * inst.value[k];
  for (int j = 0; j < inst.num_cols(); ++j) {
    double lo = inst.lb[j], hi = inst.ub[j];
    double at_lo = std::isfinite(lo) ? rc[j] * lo : (rc[j] > 1e-9 ? -kInf : (rc[j] < -1e-9 ? kInf : 0.0));
    double at_hi = std::isfinite(hi) ? rc[j] * hi : (rc[j] < -1e-9 ? -kInf : (rc[j] > 1e-9 ? kInf : 0.0));
    g += std::min(at_lo, at_hi);
  }
  return g;
}

MilpInstance random_lp(Pcg32& rng, int max_rows, int max_cols) {
  MilpInstance inst;
  int m = 1 + static_cast<int>(rng.next_double() * max_rows);
  int n = 2 + static_cast<int>(rng.next_double() * (max_cols - 1));
  for (int r = 0; r < m; ++r) {
    double u = rng.next_double();
    RowSense s = u < 0.5 ? RowSense::LE : (u < 0.8 ? RowSense::GE : RowSense::EQ);
    inst.add_row(s, rng.next_double() * 5.0);
  }
  std::vector<int> hits(m, 0);
  for (int j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> entries;
    for (int r = 0; r < m; ++r) {
      if (rng.next_double() < 0.6) {
        double v = -2.0 + 4.0 * rng.next_double();
        if (std::abs(v) < 0.05) v = 0.5;
        entries.push_back({r, v});
        ++hits[r];
      }
    }
    double ub = rng.next_double() < 0.3 ? 1.0 + 9.0 * rng.next_double() : kInf;
    inst.add_column(0.01 + 2.0 * rng.next_double(), 0.0, ub, false, entries);
  }
  // Give empty rows one coefficient so every row participates.
  for (int r = 0; r < m; ++r) {
    if (hits[r] == 0) {
      inst.row_index.push_back(r);
      inst.value.push_back(1.0);
      // splice into the last column
      inst.col_start.back() = static_cast<std::int64_t>(inst.row_index.size());
    }
  }
  return inst;
}

}  // namespace

TEST_CASE("single lower-bounding row") {
  MilpInstance inst;
  inst.add_row(RowSense::GE, 3.0);
  inst.add_column(1.0, 0.0, kInf, false, {{0, 1.0}});
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(3.0, 1e-9));
  REQUIRE(sol.x.size() == 1);
  CHECK_THAT(sol.x[0], Catch::Matchers::WithinAbs(3.0, 1e-9));
  // Sensitivity sign: raising the requirement raises the optimum.
  REQUIRE(sol.duals.size() == 1);
  CHECK_THAT(sol.duals[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("packing two variables against one budget row") {
  MilpInstance inst;
  inst.add_row(RowSense::LE, 1.0);
  inst.add_column(-1.0, 0.0, kInf, false, {{0, 1.0}});
  inst.add_column(-1.0, 0.0, kInf, false, {{0, 1.0}});
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(-1.0, 1e-9));
  CHECK_THAT(sol.x[0] + sol.x[1], Catch::Matchers::WithinAbs(1.0, 1e-9));
  // Relaxing the budget decreases the minimum: negative sensitivity.
  CHECK_THAT(sol.duals[0], Catch::Matchers::WithinAbs(-1.0, 1e-9));
}

TEST_CASE("equality pair pins the solution") {
  MilpInstance inst;
  inst.add_row(RowSense::EQ, 2.0);
  inst.add_row(RowSense::EQ, 0.0);
  inst.add_column(1.0, 0.0, kInf, false, {{0, 1.0}, {1, 1.0}});
  inst.add_column(1.0, 0.0, kInf, false, {{0, 1.0}, {1, -1.0}});
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(sol.x[0], Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THAT(sol.x[1], Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("unbounded and infeasible instances are classified") {
  MilpInstance ray;
  ray.add_row(RowSense::GE, 1.0);
  ray.add_column(-1.0, 0.0, kInf, false, {{0, 1.0}});
  CHECK(solve_lp(ray).status == LpStatus::Unbounded);

  MilpInstance empty;
  empty.add_row(RowSense::LE, -1.0);
  empty.add_column(1.0, 0.0, kInf, false, {{0, 1.0}});
  CHECK(solve_lp(empty).status == LpStatus::Infeasible);

  MilpInstance crossed;
  crossed.add_column(1.0, 2.0, 1.0, false, {});
  CHECK(solve_lp(crossed).status == LpStatus::Infeasible);
}

TEST_CASE("row-free instances optimize at bounds") {
  MilpInstance inst;
  inst.add_column(-1.0, 2.0, 5.0, false, {});
  inst.add_column(1.0, 1.0, 4.0, false, {});
  inst.add_column(0.0, -kInf, kInf, false, {});
  inst.obj_offset = 10.0;
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK(sol.x[0] == 5.0);
  CHECK(sol.x[1] == 1.0);
  CHECK(sol.x[2] == 0.0);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(10.0 - 5.0 + 1.0, 1e-12));

  MilpInstance free_ray;
  free_ray.add_column(-1.0, 2.0, kInf, false, {});
  CHECK(solve_lp(free_ray).status == LpStatus::Unbounded);
}

TEST_CASE("upper bounds engage through bound flips") {
  MilpInstance inst;
  inst.add_row(RowSense::LE, 10.0);
  inst.add_column(-1.0, 2.0, 5.0, false, {{0, 1.0}});
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(-5.0, 1e-9));
  CHECK_THAT(sol.x[0], Catch::Matchers::WithinAbs(5.0, 1e-9));
}

TEST_CASE("fixed columns contribute constants") {
  MilpInstance inst;
  inst.add_row(RowSense::LE, 4.0);
  inst.add_column(1.0, 2.0, 2.0, false, {{0, 1.0}});
  inst.add_column(-1.0, 0.0, kInf, false, {{0, 1.0}});
  LpSolution sol = solve_lp(inst);
  REQUIRE(sol.status == LpStatus::Optimal);
  CHECK_THAT(sol.x[0], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(sol.x[1], Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK_THAT(sol.objective, Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("random instances match basis enumeration") {
  Pcg32 rng(314159, 1);
  int optimal_seen = 0, infeasible_seen = 0;
  for (int trial = 0; trial < 120; ++trial) {
    MilpInstance inst = random_lp(rng, 4, 6);
    double ref = brute_force_lp(inst);
    LpSolution sol = solve_lp(inst);
    INFO("trial " << trial << " rows " << inst.num_rows() << " cols " << inst.num_cols());
    if (std::isinf(ref)) {
      REQUIRE(sol.status == LpStatus::Infeasible);
      ++infeasible_seen;
      continue;
    }
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(ref, 1e-7 * (1.0 + std::abs(ref))));
    REQUIRE(inst.max_violation(sol.x, false) < 1e-7);
    double g = dual_bound(inst, sol);
    REQUIRE_THAT(g, Catch::Matchers::WithinAbs(sol.objective, 1e-6 * (1.0 + std::abs(sol.objective))));
    ++optimal_seen;
  }
  // The generator must exercise both outcomes.
  CHECK(optimal_seen >= 30);
  CHECK(infeasible_seen >= 5);
}

TEST_CASE("iteration limit surfaces as an error") {
  MilpInstance inst;
  inst.add_row(RowSense::LE, 1.0);
  inst.add_column(-1.0, 0.0, kInf, false, {{0, 1.0}});
  LpOptions opt;
  opt.max_iterations = 0;
  CHECK_THROWS_AS(solve_lp(inst, opt), SolverError);
}
