#pragma once

// Sparse standard-form mixed-integer instance. Column-major storage: the
// builder, the simplex pricing loop, and the MPS writer all walk columns.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "relayplan/common.hpp"

namespace relayplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense : char { LE, EQ, GE };

// Maps a column back to its model meaning. Plain columns carry no semantics
// (imported files, ad-hoc LPs).
struct VarKey {
  enum class Type : char { Plain, X, F, E };
  Type type = Type::Plain;
  // X: (hub, l1, l2, season)
  // F: (od, arc, period, scenario, season)
  // E: (hub, period, scenario, season)
  std::int32_t a = 0, b = 0, c = 0, d = 0, e = 0;

  static VarKey x(int hub, int l1, int l2, int season) {
    return {Type::X, hub, l1, l2, season, 0};
  }
  static VarKey f(int od, int arc, int period, int scenario, int season) {
    return {Type::F, od, arc, period, scenario, season};
  }
  static VarKey extra(int hub, int period, int scenario, int season) {
    return {Type::E, hub, period, scenario, season, 0};
  }
};

class MilpInstance {
 public:
  std::string name = "model";
  double obj_offset = 0.0;

  // Rows.
  std::vector<RowSense> sense;
  std::vector<double> rhs;

  // Columns.
  std::vector<double> obj;
  std::vector<double> lb, ub;
  std::vector<std::uint8_t> is_int;
  std::vector<VarKey> key;

  // Column-major nonzeros.
  std::vector<std::int64_t> col_start;  // size num_cols()+1
  std::vector<std::int32_t> row_index;
  std::vector<double> value;

  MilpInstance() { col_start.push_back(0); }

  int num_rows() const { return static_cast<int>(sense.size()); }
  int num_cols() const { return static_cast<int>(obj.size()); }
  std::int64_t num_nonzeros() const { return static_cast<std::int64_t>(value.size()); }

  int add_row(RowSense s, double b) {
    sense.push_back(s);
    rhs.push_back(b);
    return num_rows() - 1;
  }

  int add_column(double cost, double lower, double upper, bool integer,
                 const std::vector<std::pair<int, double>>& entries, VarKey k = {}) {
    obj.push_back(cost);
    lb.push_back(lower);
    ub.push_back(upper);
    is_int.push_back(integer ? 1 : 0);
    key.push_back(k);
    for (const auto& [r, v] : entries) {
      if (r < 0 || r >= num_rows())
        throw ConstructionError("column references missing row " + std::to_string(r));
      if (v != 0.0) {
        row_index.push_back(r);
        value.push_back(v);
      }
    }
    col_start.push_back(static_cast<std::int64_t>(row_index.size()));
    return num_cols() - 1;
  }

  // Appends one nonzero to the column currently under construction via
  // begin_column/end_column. Cheaper than building entry vectors in hot loops.
  void begin_column(double cost, double lower, double upper, bool integer, VarKey k = {}) {
    obj.push_back(cost);
    lb.push_back(lower);
    ub.push_back(upper);
    is_int.push_back(integer ? 1 : 0);
    key.push_back(k);
  }
  void push_entry(int row, double v) {
    if (v != 0.0) {
      row_index.push_back(row);
      value.push_back(v);
    }
  }
  void end_column() { col_start.push_back(static_cast<std::int64_t>(row_index.size())); }

  bool any_integer() const {
    for (auto f : is_int)
      if (f) return true;
    return false;
  }

  double objective_value(const std::vector<double>& x) const {
    double v = obj_offset;
    for (int j = 0; j < num_cols(); ++j) v += obj[j] * x[j];
    return v;
  }

  // Row activities Ax for a candidate point.
  std::vector<double> row_activity(const std::vector<double>& x) const {
    std::vector<double> act(num_rows(), 0.0);
    for (int j = 0; j < num_cols(); ++j) {
      if (x[j] == 0.0) continue;
      for (std::int64_t k = col_start[j]; k < col_start[j + 1]; ++k)
        act[row_index[k]] += value[k] * x[j];
    }
    return act;
  }

  // Max violation of rows, bounds, and integrality. Used as the always-on
  // incumbent audit inside branch and bound.
  double max_violation(const std::vector<double>& x, bool check_integrality = true) const {
    double worst = 0.0;
    auto act = row_activity(x);
    for (int r = 0; r < num_rows(); ++r) {
      double diff = act[r] - rhs[r];
      switch (sense[r]) {
        case RowSense::LE: worst = std::max(worst, diff); break;
        case RowSense::GE: worst = std::max(worst, -diff); break;
        case RowSense::EQ: worst = std::max(worst, std::abs(diff)); break;
      }
    }
    for (int j = 0; j < num_cols(); ++j) {
      worst = std::max(worst, lb[j] - x[j]);
      worst = std::max(worst, x[j] - ub[j]);
      if (check_integrality && is_int[j])
        worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
    }
    return worst;
  }

  void validate() const {
    if (static_cast<int>(col_start.size()) != num_cols() + 1)
      throw ConstructionError("column starts out of sync");
    for (int j = 0; j < num_cols(); ++j) {
      if (lb[j] > ub[j]) throw ConstructionError("column " + std::to_string(j) + " has lb > ub");
      if (is_int[j] && (lb[j] < -tol::integrality || ub[j] > 1.0 + tol::integrality))
        throw ConstructionError("integer columns must be binary");
      for (std::int64_t k = col_start[j]; k < col_start[j + 1]; ++k)
        if (row_index[k] < 0 || row_index[k] >= num_rows())
          throw ConstructionError("nonzero references missing row");
    }
  }
};

}  // namespace relayplan
