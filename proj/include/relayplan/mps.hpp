#pragma once

// Fixed-format MPS writer and reader. Fields sit at the classic column
// positions (2-3, 5-12, 15-22, 25-36, 40-47, 50-61). Values are written as
// the shortest decimal that parses back to the identical double; the rare
// value needing more than the classic 12 characters runs long on its own
// line, and the reader tokenizes from the value column, so every double
// survives a round trip bit for bit.

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "relayplan/common.hpp"
#include "relayplan/instance.hpp"

namespace relayplan {

namespace detail {

inline std::string mps_value(double v) {
  char buf[40];
  for (int p = 1; p <= 16; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void mps_field(std::string& line, std::size_t pos, const std::string& s) {
  if (line.size() < pos + s.size()) line.resize(pos + s.size(), ' ');
  for (std::size_t i = 0; i < s.size(); ++i) line[pos + i] = s[i];
}

// 0-based start offsets of the six MPS fields.
inline constexpr std::size_t kMpsF1 = 1, kMpsF2 = 4, kMpsF3 = 14, kMpsF4 = 24, kMpsF5 = 39,
                             kMpsF6 = 49;

inline std::string mps_row_name(int r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "R%07d", r + 1);
  return buf;
}

inline std::string mps_col_name(int c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "C%07d", c + 1);
  return buf;
}

inline std::string mps_slice(const std::string& line, std::size_t pos, std::size_t len) {
  if (pos >= line.size()) return "";
  std::string s = line.substr(pos, len);
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

inline double mps_parse_number(const std::string& s, int lineno) {
  if (s.empty()) throw ParseError("missing numeric field", lineno);
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ParseError("bad numeric field '" + s + "'", lineno);
  return v;
}

}  // namespace detail

inline void write_mps(const MilpInstance& inst, std::ostream& out) {
  using namespace detail;
  auto emit = [&](const std::string& l) {
    std::string t = l;
    while (!t.empty() && t.back() == ' ') t.pop_back();
    out << t << '\n';
  };

  {
    std::string l;
    mps_field(l, 0, "NAME");
    mps_field(l, kMpsF3, inst.name.empty() ? std::string("MODEL") : inst.name);
    emit(l);
  }
  emit("ROWS");
  {
    std::string l;
    mps_field(l, kMpsF1, "N");
    mps_field(l, kMpsF2, "COST");
    emit(l);
  }
  for (int r = 0; r < inst.num_rows(); ++r) {
    std::string l;
    const char* t = inst.sense[r] == RowSense::LE ? "L" : inst.sense[r] == RowSense::GE ? "G" : "E";
    mps_field(l, kMpsF1, t);
    mps_field(l, kMpsF2, mps_row_name(r));
    emit(l);
  }

  emit("COLUMNS");
  bool in_int = false;
  int marker = 0;
  auto set_marker = [&](bool want) {
    if (want == in_int) return;
    std::string l;
    char name[16];
    std::snprintf(name, sizeof name, "M%07d", ++marker);
    mps_field(l, kMpsF2, name);
    mps_field(l, kMpsF3, "'MARKER'");
    mps_field(l, kMpsF5, want ? "'INTORG'" : "'INTEND'");
    emit(l);
    in_int = want;
  };
  for (int j = 0; j < inst.num_cols(); ++j) {
    set_marker(inst.is_int[j] != 0);
    auto entry = [&](const std::string& row, double v) {
      std::string l;
      mps_field(l, kMpsF2, mps_col_name(j));
      mps_field(l, kMpsF3, row);
      mps_field(l, kMpsF4, mps_value(v));
      emit(l);
    };
    if (inst.obj[j] != 0.0) entry("COST", inst.obj[j]);
    for (std::int64_t k = inst.col_start[j]; k < inst.col_start[j + 1]; ++k)
      entry(mps_row_name(inst.row_index[k]), inst.value[k]);
  }
  set_marker(false);

  emit("RHS");
  if (inst.obj_offset != 0.0) {
    std::string l;
    mps_field(l, kMpsF2, "RHS");
    mps_field(l, kMpsF3, "COST");
    mps_field(l, kMpsF4, mps_value(-inst.obj_offset));
    emit(l);
  }
  for (int r = 0; r < inst.num_rows(); ++r) {
    if (inst.rhs[r] == 0.0) continue;
    std::string l;
    mps_field(l, kMpsF2, "RHS");
    mps_field(l, kMpsF3, mps_row_name(r));
    mps_field(l, kMpsF4, mps_value(inst.rhs[r]));
    emit(l);
  }

  emit("BOUNDS");
  for (int j = 0; j < inst.num_cols(); ++j) {
    double lo = inst.lb[j], hi = inst.ub[j];
    auto bound = [&](const char* type, bool with_value, double v) {
      std::string l;
      mps_field(l, kMpsF1, type);
      mps_field(l, kMpsF2, "BND");
      mps_field(l, kMpsF3, mps_col_name(j));
      if (with_value) mps_field(l, kMpsF4, mps_value(v));
      emit(l);
    };
    if (lo == hi) {
      bound("FX", true, lo);
      continue;
    }
    bool def_lo = lo == 0.0;
    bool def_hi = !std::isfinite(hi) || (inst.is_int[j] && hi == 1.0);
    if (lo == -kInf && hi == kInf) {
      bound("FR", false, 0.0);
      continue;
    }
    if (!def_lo) bound(lo == -kInf ? "MI" : "LO", lo != -kInf, lo);
    if (!def_hi) bound("UP", true, hi);
  }
  emit("ENDATA");
}

inline std::string to_mps(const MilpInstance& inst) {
  std::ostringstream os;
  write_mps(inst, os);
  return os.str();
}

inline MilpInstance read_mps(std::istream& in) {
  using namespace detail;
  enum class Sec { None, Rows, Columns, Rhs, Ranges, Bounds, Done };
  Sec sec = Sec::None;
  MilpInstance inst;
  std::string objname;
  std::unordered_map<std::string, int> row_id;
  std::unordered_map<std::string, int> col_id;

  std::string cur_col;
  bool cur_int = false, in_int = false;
  double cur_obj = 0.0;
  std::vector<std::pair<int, double>> cur_entries;

  auto flush_col = [&](int lineno) {
    if (cur_col.empty()) return;
    if (col_id.count(cur_col)) throw ParseError("column '" + cur_col + "' not contiguous", lineno);
    double hi = cur_int ? 1.0 : kInf;
    int j = inst.add_column(cur_obj, 0.0, hi, cur_int, cur_entries);
    col_id.emplace(cur_col, j);
    cur_col.clear();
    cur_obj = 0.0;
    cur_entries.clear();
  };

  std::string line;
  int lineno = 0;
  bool saw_end = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ' && line[0] != '\t') {
      std::istringstream hs(line);
      std::string head;
      hs >> head;
      if (head == "NAME") {
        inst.name = mps_slice(line, kMpsF3, 8);
        if (inst.name.empty()) inst.name = "model";
      } else if (head == "ROWS") {
        sec = Sec::Rows;
      } else if (head == "COLUMNS") {
        sec = Sec::Columns;
      } else if (head == "RHS") {
        flush_col(lineno);
        sec = Sec::Rhs;
      } else if (head == "RANGES") {
        flush_col(lineno);
        sec = Sec::Ranges;
      } else if (head == "BOUNDS") {
        flush_col(lineno);
        sec = Sec::Bounds;
      } else if (head == "ENDATA") {
        flush_col(lineno);
        sec = Sec::Done;
        saw_end = true;
        break;
      } else {
        throw ParseError("unknown section '" + head + "'", lineno);
      }
      continue;
    }

    std::string f1 = mps_slice(line, kMpsF1, 2);
    std::string f2 = mps_slice(line, kMpsF2, 8);
    std::string f3 = mps_slice(line, kMpsF3, 8);
    // The value field and the optional second pair are tokenized rather than
    // sliced so numerals longer than the classic 12 columns keep every digit.
    std::string f4, f5, f6;
    if (line.size() > kMpsF4) {
      std::istringstream tail(line.substr(kMpsF4));
      tail >> f4 >> f5 >> f6;
    }

    switch (sec) {
      case Sec::Rows: {
        if (f1.empty() || f2.empty()) throw ParseError("malformed row line", lineno);
        if (f1 == "N") {
          if (objname.empty())
            objname = f2;
          else
            throw ParseError("multiple objective rows", lineno);
        } else {
          RowSense s;
          if (f1 == "L")
            s = RowSense::LE;
          else if (f1 == "G")
            s = RowSense::GE;
          else if (f1 == "E")
            s = RowSense::EQ;
          else
            throw ParseError("unknown row type '" + f1 + "'", lineno);
          if (row_id.count(f2)) throw ParseError("duplicate row '" + f2 + "'", lineno);
          row_id.emplace(f2, inst.add_row(s, 0.0));
        }
        break;
      }
      case Sec::Columns: {
        if (f3 == "'MARKER'") {
          if (f4 == "'INTORG'" || f5 == "'INTORG'")
            in_int = true;
          else if (f4 == "'INTEND'" || f5 == "'INTEND'")
            in_int = false;
          else
            throw ParseError("unknown marker", lineno);
          break;
        }
        if (f2.empty() || f3.empty()) throw ParseError("malformed column line", lineno);
        if (f2 != cur_col) {
          flush_col(lineno);
          cur_col = f2;
          cur_int = in_int;
        }
        auto add = [&](const std::string& row, const std::string& val) {
          double v = mps_parse_number(val, lineno);
          if (row == objname) {
            if (cur_obj != 0.0) throw ParseError("duplicate objective entry", lineno);
            cur_obj = v;
            return;
          }
          auto it = row_id.find(row);
          if (it == row_id.end()) throw ParseError("unknown row '" + row + "'", lineno);
          for (const auto& [r, old] : cur_entries)
            if (r == it->second) throw ParseError("duplicate entry in row '" + row + "'", lineno);
          cur_entries.emplace_back(it->second, v);
        };
        add(f3, f4);
        if (!f5.empty()) add(f5, f6);
        break;
      }
      case Sec::Rhs: {
        if (f3.empty()) throw ParseError("malformed rhs line", lineno);
        auto apply = [&](const std::string& row, const std::string& val) {
          double v = mps_parse_number(val, lineno);
          if (row == objname) {
            inst.obj_offset = -v;
            return;
          }
          auto it = row_id.find(row);
          if (it == row_id.end()) throw ParseError("unknown row '" + row + "'", lineno);
          inst.rhs[it->second] = v;
        };
        apply(f3, f4);
        if (!f5.empty()) apply(f5, f6);
        break;
      }
      case Sec::Ranges:
        throw ParseError("ranges are not supported", lineno);
      case Sec::Bounds: {
        if (f1.empty() || f3.empty()) throw ParseError("malformed bound line", lineno);
        auto it = col_id.find(f3);
        if (it == col_id.end()) throw ParseError("unknown column '" + f3 + "'", lineno);
        int j = it->second;
        if (f1 == "UP")
          inst.ub[j] = mps_parse_number(f4, lineno);
        else if (f1 == "LO")
          inst.lb[j] = mps_parse_number(f4, lineno);
        else if (f1 == "FX")
          inst.lb[j] = inst.ub[j] = mps_parse_number(f4, lineno);
        else if (f1 == "FR") {
          inst.lb[j] = -kInf;
          inst.ub[j] = kInf;
        } else if (f1 == "MI")
          inst.lb[j] = -kInf;
        else if (f1 == "PL")
          inst.ub[j] = kInf;
        else if (f1 == "BV") {
          inst.lb[j] = 0.0;
          inst.ub[j] = 1.0;
          inst.is_int[j] = 1;
        } else
          throw ParseError("unknown bound type '" + f1 + "'", lineno);
        break;
      }
      case Sec::None:
      case Sec::Done:
        throw ParseError("data line outside any section", lineno);
    }
  }
  if (!saw_end) throw ParseError("missing ENDATA", lineno);
  if (objname.empty()) throw ParseError("missing objective row", lineno);
  for (int j = 0; j < inst.num_cols(); ++j)
    if (inst.lb[j] > inst.ub[j])
      throw ParseError("column " + std::to_string(j + 1) + " has crossed bounds", lineno);
  return inst;
}

inline MilpInstance from_mps(const std::string& text) {
  std::istringstream is(text);
  return read_mps(is);
}

}  // namespace relayplan
