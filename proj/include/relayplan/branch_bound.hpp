#pragma once

// Best-bound branch and bound over the binary columns of a MilpInstance.
// Node relaxations are solved from scratch by the bounded simplex; every
// incumbent is re-checked against the original rows before acceptance.

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"
#include "relayplan/simplex.hpp"

namespace relayplan {

enum class MilpStatus : char { Optimal, Infeasible, Unbounded, NodeLimit, TimeLimit };

inline const char* to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
    case MilpStatus::NodeLimit: return "node_limit";
    default: return "time_limit";
  }
}

struct BnbOptions {
  double rel_gap = 1e-6;
  long max_nodes = 2000000;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  LpOptions lp;
  std::function<void(const std::string&)> log;
  // Called on every accepted incumbent with the full solution vector.
  std::function<void(const std::vector<double>&, double)> on_incumbent;
};

struct BnbResult {
  MilpStatus status = MilpStatus::Infeasible;
  bool has_incumbent = false;
  double objective = std::numeric_limits<double>::infinity();
  double bound = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  long nodes = 0;
  long lp_iterations = 0;
  double wall_seconds = 0.0;
};

namespace detail {

inline double bnb_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return std::numeric_limits<double>::infinity();
  return (incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

// Drops columns with lb == ub, folding them into rhs and objective offset.
struct FixedColumnPresolve {
  MilpInstance reduced;
  std::vector<int> keep;          // reduced column -> original column
  std::vector<double> fixed_val;  // original column -> value if fixed, else 0

  explicit FixedColumnPresolve(const MilpInstance& inst) {
    reduced.name = inst.name;
    reduced.obj_offset = inst.obj_offset;
    reduced.sense = inst.sense;
    reduced.rhs = inst.rhs;
    fixed_val.assign(inst.num_cols(), 0.0);
    for (int j = 0; j < inst.num_cols(); ++j) {
      if (inst.lb[j] == inst.ub[j]) {
        double v = inst.lb[j];
        fixed_val[j] = v;
        if (v != 0.0) {
          reduced.obj_offset += inst.obj[j] * v;
          for (std::int64_t k = inst.col_start[j]; k < inst.col_start[j + 1]; ++k)
            reduced.rhs[inst.row_index[k]] -= inst.value[k] * v;
        }
        continue;
      }
      keep.push_back(j);
      reduced.begin_column(inst.obj[j], inst.lb[j], inst.ub[j], inst.is_int[j] != 0,
                           inst.key[j]);
      for (std::int64_t k = inst.col_start[j]; k < inst.col_start[j + 1]; ++k)
        reduced.push_entry(inst.row_index[k], inst.value[k]);
      reduced.end_column();
    }
  }

  std::vector<double> expand(const std::vector<double>& xr) const {
    std::vector<double> x = fixed_val;
    for (std::size_t r = 0; r < keep.size(); ++r) x[keep[r]] = xr[r];
    return x;
  }
};

}  // namespace detail

inline BnbResult solve_milp(const MilpInstance& inst, const BnbOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  detail::FixedColumnPresolve pre(inst);
  const MilpInstance& red = pre.reduced;
  const int n = red.num_cols();

  BnbResult res;
  auto emit = [&](long node, double bound, double incumbent) {
    if (!opt.log) return;
    std::ostringstream os;
    os << "BNB " << node << " " << bound << " ";
    if (std::isfinite(incumbent))
      os << incumbent;
    else
      os << "none";
    os << " " << detail::bnb_gap(incumbent, bound);
    opt.log(os.str());
  };

  struct Node {
    double bound;
    long id;
    std::vector<double> lb, ub;
  };
  struct ByBound {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, ByBound> open;

  long next_id = 0;
  open.push({-std::numeric_limits<double>::infinity(), next_id++, red.lb, red.ub});

  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;

  // With best-bound selection the heap top is the global lower bound.
  auto global_bound = [&] {
    if (open.empty()) return incumbent;
    return std::min(open.top().bound, incumbent);
  };
  auto finish = [&](MilpStatus status) {
    res.status = status;
    res.bound = global_bound();
    res.gap = detail::bnb_gap(incumbent, res.bound);
    res.wall_seconds = elapsed();
    if (res.has_incumbent) {
      res.objective = incumbent;
      res.x = std::move(best_x);
    }
    emit(res.nodes, res.bound, incumbent);
    return res;
  };

  while (!open.empty()) {
    if (res.has_incumbent && detail::bnb_gap(incumbent, global_bound()) <= opt.rel_gap)
      break;
    if (res.nodes >= opt.max_nodes) return finish(MilpStatus::NodeLimit);
    if (elapsed() > opt.time_limit_seconds) return finish(MilpStatus::TimeLimit);

    Node node = open.top();
    open.pop();
    ++res.nodes;
    if (node.bound >= incumbent - 1e-9 * std::max(1.0, std::abs(incumbent))) continue;

    LpSolution lp = solve_lp_bounded(red, node.lb, node.ub, opt.lp);
    res.lp_iterations += lp.iterations;
    if (lp.status == LpStatus::Infeasible) continue;
    if (lp.status == LpStatus::Unbounded) return finish(MilpStatus::Unbounded);
    if (lp.objective >= incumbent - 1e-9 * std::max(1.0, std::abs(incumbent))) continue;

    // Most fractional binary, ties to the lowest column index.
    int branch = -1;
    double best_frac = tol::integrality;
    for (int j = 0; j < n; ++j) {
      if (!red.is_int[j]) continue;
      double f = lp.x[j] - std::floor(lp.x[j]);
      double dist = std::min(f, 1.0 - f);
      if (dist > best_frac + 1e-12) {
        best_frac = dist;
        branch = j;
      }
    }

    if (branch < 0) {
      std::vector<double> full = pre.expand(lp.x);
      for (int j = 0; j < inst.num_cols(); ++j)
        if (inst.is_int[j]) full[j] = std::round(full[j]);
      double viol = inst.max_violation(full);
      if (viol > 1e-6)
        throw SolutionIntegrityError("incumbent violates rows by " + std::to_string(viol));
      incumbent = lp.objective;
      best_x = std::move(full);
      res.has_incumbent = true;
      if (opt.on_incumbent) opt.on_incumbent(best_x, incumbent);
      emit(res.nodes, global_bound(), incumbent);
      continue;
    }

    Node down{lp.objective, next_id++, node.lb, node.ub};
    down.ub[branch] = 0.0;
    Node up{lp.objective, next_id++, std::move(node.lb), std::move(node.ub)};
    up.lb[branch] = 1.0;
    open.push(std::move(down));
    open.push(std::move(up));
    if (res.nodes % 100 == 0 && opt.log) emit(res.nodes, global_bound(), incumbent);
  }

  if (!res.has_incumbent) {
    res.status = MilpStatus::Infeasible;
    res.wall_seconds = elapsed();
    return res;
  }
  return finish(MilpStatus::Optimal);
}

}  // namespace relayplan
