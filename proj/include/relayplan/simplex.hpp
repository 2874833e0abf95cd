#pragma once

// Two-phase revised simplex for bounded variables. Basis kept as a dense LU
// factorization plus product-form eta updates, refactorized every 50 pivots
// or when the basic-solution residual drifts. Dantzig pricing with a Bland
// fallback once degeneracy stalls progress.

#include <cmath>
#include <cstdint>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"

namespace relayplan {

enum class LpStatus : char { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    default: return "unbounded";
  }
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;             // includes the instance objective offset
  std::vector<double> x;              // structural values, empty unless optimal
  std::vector<double> duals;          // per row, sensitivity sign: d obj / d rhs
  std::vector<double> reduced_costs;  // per structural column
  long iterations = 0;
};

struct LpOptions {
  long max_iterations = 500000;
  int refactor_interval = 50;
  long bland_after_degenerate = 5000;
};

namespace detail {

class BoundedSimplex {
 public:
  BoundedSimplex(const MilpInstance& inst, const std::vector<double>& lb,
                 const std::vector<double>& ub, const LpOptions& opt)
      : inst_(inst), opt_(opt), m_(inst.num_rows()), n_(inst.num_cols()) {
    total_ = n_ + 2 * m_;
    lo_.resize(total_);
    hi_.resize(total_);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lb[j];
      hi_[j] = ub[j];
      if (lo_[j] > hi_[j] + tol::feasibility) infeasible_bounds_ = true;
      if (lo_[j] > hi_[j]) hi_[j] = lo_[j];
    }
    for (int i = 0; i < m_; ++i) {
      int s = n_ + i;
      switch (inst.sense[i]) {
        case RowSense::LE: lo_[s] = 0.0; hi_[s] = kInf; break;
        case RowSense::GE: lo_[s] = -kInf; hi_[s] = 0.0; break;
        case RowSense::EQ: lo_[s] = 0.0; hi_[s] = 0.0; break;
      }
    }
    art_sign_.assign(m_, 1.0);
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + m_ + i] = 0.0;
      hi_[n_ + m_ + i] = 0.0;  // widened to [0,inf) only during phase 1 setup
    }
  }

  LpSolution run() {
    LpSolution out;
    if (infeasible_bounds_) return out;
    if (m_ == 0) return solve_unconstrained();

    setup_phase1();
    cost_.assign(total_, 0.0);
    for (int i = 0; i < m_; ++i) cost_[n_ + m_ + i] = 1.0;
    LpStatus st = iterate();
    out.iterations = iters_;
    if (st == LpStatus::Unbounded) throw SolverError("phase 1 reported unbounded");
    if (basic_cost_value() > 1e-7 * (1.0 + rhs_scale_)) return out;  // infeasible

    // Pin artificials at zero. Any still basic sit at value zero and leave the
    // basis through degenerate ratio-test blocks if ever pushed.
    for (int i = 0; i < m_; ++i) hi_[n_ + m_ + i] = 0.0;
    for (int j = n_ + m_; j < total_; ++j)
      if (state_[j] == kAtUpper) state_[j] = kAtLower;

    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = inst_.obj[j];
    degenerate_run_ = 0;
    bland_ = false;
    st = iterate();
    out.iterations = iters_;
    out.status = st;
    if (st != LpStatus::Optimal) return out;

    out.x.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) out.x[j] = value_of(j);
    out.objective = inst_.obj_offset;
    for (int j = 0; j < n_; ++j) out.objective += inst_.obj[j] * out.x[j];
    out.duals = btran_basis_costs();
    out.reduced_costs.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (state_[j] == kBasic) continue;
      out.reduced_costs[j] = cost_[j] - dot_column(j, out.duals);
    }
    return out;
  }

 private:
  static constexpr int kBasic = -1;
  static constexpr int kAtLower = 0;
  static constexpr int kAtUpper = 1;
  static constexpr int kFreeZero = 2;
  static constexpr double kPivotTol = 1e-10;

  const MilpInstance& inst_;
  LpOptions opt_;
  int m_, n_, total_;
  bool infeasible_bounds_ = false;
  std::vector<double> lo_, hi_, cost_;
  std::vector<double> art_sign_;

  std::vector<int> basis_;    // row position -> column
  std::vector<int> state_;    // column -> kBasic or nonbasic state
  std::vector<double> xb_;    // basic values by row position
  std::vector<int> bpos_;     // column -> row position if basic

  std::vector<double> lu_;
  std::vector<int> piv_;
  struct Eta {
    int r;
    std::vector<double> d;
  };
  std::vector<Eta> etas_;
  int pivots_since_refactor_ = 0;
  long iters_ = 0;
  long degenerate_run_ = 0;
  bool bland_ = false;
  double rhs_scale_ = 0.0;

  double value_of(int j) const {
    if (state_[j] == kBasic) return xb_[bpos_[j]];
    if (state_[j] == kAtLower) return lo_[j];
    if (state_[j] == kAtUpper) return hi_[j];
    return 0.0;
  }

  // Column j of the working matrix as (row, coeff) pairs.
  template <typename Fn>
  void for_column(int j, Fn&& fn) const {
    if (j < n_) {
      for (std::int64_t k = inst_.col_start[j]; k < inst_.col_start[j + 1]; ++k)
        fn(inst_.row_index[k], inst_.value[k]);
    } else if (j < n_ + m_) {
      fn(j - n_, 1.0);
    } else {
      fn(j - n_ - m_, art_sign_[j - n_ - m_]);
    }
  }

  double dot_column(int j, const std::vector<double>& y) const {
    double s = 0.0;
    for_column(j, [&](int r, double v) { s += y[r] * v; });
    return s;
  }

  LpSolution solve_unconstrained() {
    LpSolution out;
    out.x.assign(n_, 0.0);
    out.objective = inst_.obj_offset;
    for (int j = 0; j < n_; ++j) {
      double c = inst_.obj[j];
      double v;
      if (c > 0.0)
        v = lo_[j];
      else if (c < 0.0)
        v = hi_[j];
      else
        v = std::isfinite(lo_[j]) ? lo_[j] : (std::isfinite(hi_[j]) ? hi_[j] : 0.0);
      if (!std::isfinite(v)) {
        out.status = LpStatus::Unbounded;
        out.x.clear();
        return out;
      }
      out.x[j] = v;
      out.objective += c * v;
    }
    out.status = LpStatus::Optimal;
    out.reduced_costs = inst_.obj;
    return out;
  }

  void setup_phase1() {
    state_.assign(total_, kAtLower);
    for (int j = 0; j < n_ + m_; ++j) {
      if (std::isfinite(lo_[j]) && std::isfinite(hi_[j]))
        state_[j] = std::abs(lo_[j]) <= std::abs(hi_[j]) ? kAtLower : kAtUpper;
      else if (std::isfinite(lo_[j]))
        state_[j] = kAtLower;
      else if (std::isfinite(hi_[j]))
        state_[j] = kAtUpper;
      else
        state_[j] = kFreeZero;
    }
    std::vector<double> resid = inst_.rhs;
    rhs_scale_ = 0.0;
    for (double b : inst_.rhs) rhs_scale_ = std::max(rhs_scale_, std::abs(b));
    for (int j = 0; j < n_ + m_; ++j) {
      double v = value_of(j);
      if (v == 0.0) continue;
      for_column(j, [&](int r, double a) { resid[r] -= a * v; });
    }
    basis_.resize(m_);
    bpos_.assign(total_, -1);
    xb_.assign(m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      art_sign_[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
      int j = n_ + m_ + i;
      lo_[j] = 0.0;
      hi_[j] = kInf;
      basis_[i] = j;
      bpos_[j] = i;
      state_[j] = kBasic;
      xb_[i] = std::abs(resid[i]);
    }
    refactorize();
  }

  double basic_cost_value() const {
    double s = 0.0;
    for (int j = 0; j < total_; ++j)
      if (cost_[j] != 0.0) s += cost_[j] * value_of(j);
    return s;
  }

  void refactorize() {
    lu_.assign(static_cast<std::size_t>(m_) * m_, 0.0);
    for (int i = 0; i < m_; ++i) {
      int j = basis_[i];
      for_column(j, [&](int r, double v) { lu_[static_cast<std::size_t>(r) * m_ + i] = v; });
    }
    piv_.resize(m_);
    for (int k = 0; k < m_; ++k) {
      int p = k;
      double best = std::abs(lu_[static_cast<std::size_t>(k) * m_ + k]);
      for (int r = k + 1; r < m_; ++r) {
        double v = std::abs(lu_[static_cast<std::size_t>(r) * m_ + k]);
        if (v > best) {
          best = v;
          p = r;
        }
      }
      if (best < 1e-13) throw SolverError("singular basis during refactorization");
      piv_[k] = p;
      if (p != k)
        for (int c = 0; c < m_; ++c)
          std::swap(lu_[static_cast<std::size_t>(k) * m_ + c], lu_[static_cast<std::size_t>(p) * m_ + c]);
      double d = lu_[static_cast<std::size_t>(k) * m_ + k];
      for (int r = k + 1; r < m_; ++r) {
        double f = lu_[static_cast<std::size_t>(r) * m_ + k] / d;
        lu_[static_cast<std::size_t>(r) * m_ + k] = f;
        if (f != 0.0)
          for (int c = k + 1; c < m_; ++c)
            lu_[static_cast<std::size_t>(r) * m_ + c] -= f * lu_[static_cast<std::size_t>(k) * m_ + c];
      }
    }
    etas_.clear();
    pivots_since_refactor_ = 0;
    recompute_basics();
  }

  void recompute_basics() {
    std::vector<double> rhs = inst_.rhs;
    for (int j = 0; j < total_; ++j) {
      if (state_[j] == kBasic) continue;
      double v = value_of(j);
      if (v == 0.0) continue;
      for_column(j, [&](int r, double a) { rhs[r] -= a * v; });
    }
    lu_solve(rhs);
    xb_ = rhs;
  }

  // Solve B0 y = a in place (a overwritten with y), then apply etas.
  void lu_solve(std::vector<double>& a) const {
    for (int k = 0; k < m_; ++k)
      if (piv_[k] != k) std::swap(a[k], a[piv_[k]]);
    for (int k = 0; k < m_; ++k) {
      double v = a[k];
      if (v == 0.0) continue;
      for (int r = k + 1; r < m_; ++r) a[r] -= lu_[static_cast<std::size_t>(r) * m_ + k] * v;
    }
    for (int k = m_ - 1; k >= 0; --k) {
      double v = a[k] / lu_[static_cast<std::size_t>(k) * m_ + k];
      a[k] = v;
      if (v == 0.0) continue;
      for (int r = 0; r < k; ++r) a[r] -= lu_[static_cast<std::size_t>(r) * m_ + k] * v;
    }
  }

  // Solve B0^T y = c in place: U^T forward pass, L^T backward pass, then the
  // row permutation reversed.
  void lu_solve_t(std::vector<double>& c) const {
    for (int k = 0; k < m_; ++k) {
      double s = c[k];
      for (int r = 0; r < k; ++r) s -= lu_[static_cast<std::size_t>(r) * m_ + k] * c[r];
      c[k] = s / lu_[static_cast<std::size_t>(k) * m_ + k];
    }
    for (int k = m_ - 2; k >= 0; --k) {
      double s = c[k];
      for (int r = k + 1; r < m_; ++r) s -= lu_[static_cast<std::size_t>(r) * m_ + k] * c[r];
      c[k] = s;
    }
    for (int k = m_ - 1; k >= 0; --k)
      if (piv_[k] != k) std::swap(c[k], c[piv_[k]]);
  }

  std::vector<double> ftran(int j) const {
    std::vector<double> y(m_, 0.0);
    for_column(j, [&](int r, double v) { y[r] += v; });
    lu_solve(y);
    for (const auto& e : etas_) {
      double yr = y[e.r] / e.d[e.r];
      if (yr != 0.0) {
        for (int i = 0; i < m_; ++i) y[i] -= e.d[i] * yr;
        y[e.r] = yr;
      } else {
        y[e.r] = 0.0;
      }
    }
    return y;
  }

  std::vector<double> btran_basis_costs() const {
    std::vector<double> y(m_);
    for (int i = 0; i < m_; ++i) y[i] = cost_[basis_[i]];
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += it->d[i] * y[i];
      y[it->r] = (y[it->r] - (s - it->d[it->r] * y[it->r])) / it->d[it->r];
    }
    lu_solve_t(y);
    return y;
  }

  LpStatus iterate() {
    while (true) {
      if (iters_ >= opt_.max_iterations) throw SolverError("simplex iteration limit reached");
      std::vector<double> y = btran_basis_costs();
      int enter = -1, dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (state_[j] == kBasic) continue;
        if (lo_[j] == hi_[j]) continue;
        double dj = cost_[j] - dot_column(j, y);
        double viol = 0.0;
        int d = 0;
        if (state_[j] == kAtLower && dj < -tol::optimality) {
          viol = -dj;
          d = +1;
        } else if (state_[j] == kAtUpper && dj > tol::optimality) {
          viol = dj;
          d = -1;
        } else if (state_[j] == kFreeZero && std::abs(dj) > tol::optimality) {
          viol = std::abs(dj);
          d = dj < 0 ? +1 : -1;
        } else {
          continue;
        }
        if (bland_) {
          enter = j;
          dir = d;
          break;
        }
        if (viol > best + 1e-12) {
          best = viol;
          enter = j;
          dir = d;
        }
      }
      if (enter < 0) return LpStatus::Optimal;

      std::vector<double> d = ftran(enter);
      // Ratio test: tightest blocking basic variable, ties broken by larger
      // pivot magnitude then lower row position. The entering variable's own
      // bound width competes as a bound flip.
      double flip = hi_[enter] - lo_[enter];
      if (state_[enter] == kFreeZero) flip = kInf;
      int leave_pos = -1;
      int leave_to = kAtLower;
      double best_ratio = kInf;
      for (int i = 0; i < m_; ++i) {
        double di = dir * d[i];
        double ratio;
        int to;
        if (di > kPivotTol) {
          if (!std::isfinite(lo_[basis_[i]])) continue;
          ratio = (xb_[i] - lo_[basis_[i]]) / di;
          to = kAtLower;
        } else if (di < -kPivotTol) {
          if (!std::isfinite(hi_[basis_[i]])) continue;
          ratio = (hi_[basis_[i]] - xb_[i]) / (-di);
          to = kAtUpper;
        } else {
          continue;
        }
        if (ratio < 0.0) ratio = 0.0;
        bool take = false;
        if (ratio < best_ratio - 1e-12)
          take = true;
        else if (ratio < best_ratio + 1e-12 && leave_pos >= 0) {
          // Under Bland's rule ties must leave by smallest column index or
          // termination is no longer guaranteed; otherwise prefer the larger
          // pivot for stability.
          if (bland_) {
            if (basis_[i] < basis_[leave_pos]) take = true;
          } else if (std::abs(d[i]) > std::abs(d[leave_pos]) + 1e-12) {
            take = true;
          }
        }
        if (take) {
          best_ratio = std::min(best_ratio, ratio);
          leave_pos = i;
          leave_to = to;
        }
      }
      double step;
      if (leave_pos >= 0 && best_ratio <= flip + 1e-12) {
        step = best_ratio;
      } else if (std::isfinite(flip)) {
        step = flip;
        leave_pos = -1;
      } else {
        return LpStatus::Unbounded;
      }

      ++iters_;
      if (step < 1e-12) {
        if (++degenerate_run_ >= opt_.bland_after_degenerate) bland_ = true;
      } else {
        degenerate_run_ = 0;
        bland_ = false;
      }

      if (leave_pos < 0) {
        // Bound flip: entering variable crosses to its other bound.
        for (int i = 0; i < m_; ++i) xb_[i] -= dir * step * d[i];
        state_[enter] = state_[enter] == kAtLower ? kAtUpper : kAtLower;
        continue;
      }

      double enter_val = value_of(enter) + dir * step;
      for (int i = 0; i < m_; ++i) xb_[i] -= dir * step * d[i];
      int leave_col = basis_[leave_pos];
      state_[leave_col] = leave_to;
      bpos_[leave_col] = -1;
      basis_[leave_pos] = enter;
      bpos_[enter] = leave_pos;
      state_[enter] = kBasic;
      xb_[leave_pos] = enter_val;

      if (std::abs(d[leave_pos]) < kPivotTol) {
        refactorize();
      } else {
        etas_.push_back({leave_pos, std::move(d)});
        if (++pivots_since_refactor_ >= opt_.refactor_interval || residual_drift() > 1e-8)
          refactorize();
      }
    }
  }

  double residual_drift() const {
    if (pivots_since_refactor_ % 10 != 0) return 0.0;
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < total_; ++j) {
      double v = value_of(j);
      if (v == 0.0) continue;
      for_column(j, [&](int r, double a) { act[r] += a * v; });
    }
    double worst = 0.0;
    for (int i = 0; i < m_; ++i) worst = std::max(worst, std::abs(act[i] - inst_.rhs[i]));
    return worst;
  }
};

}  // namespace detail

inline LpSolution solve_lp_bounded(const MilpInstance& inst, const std::vector<double>& lb,
                                   const std::vector<double>& ub, const LpOptions& opt = {}) {
  detail::BoundedSimplex w(inst, lb, ub, opt);
  return w.run();
}

inline LpSolution solve_lp(const MilpInstance& inst, const LpOptions& opt = {}) {
  return solve_lp_bounded(inst, inst.lb, inst.ub, opt);
}

}  // namespace relayplan
