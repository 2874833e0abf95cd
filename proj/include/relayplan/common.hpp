#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace relayplan {

// Error taxonomy used across the library. The CLI maps each type to a
// machine-parseable category on stderr.
struct ArgumentError : std::invalid_argument {
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConstructionError : std::runtime_error {
  explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg), line(0) {}
  ParseError(const std::string& msg, long line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line(line) {}
  long line;
};

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SolutionIntegrityError : std::runtime_error {
  explicit SolutionIntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace tol {
// Shared numerical tolerances.
inline constexpr double feasibility = 1e-7;
inline constexpr double optimality = 1e-7;   // reduced-cost threshold
inline constexpr double integrality = 1e-6;
inline constexpr double probability = 1e-9;  // scenario weights must sum to 1 this tightly
}  // namespace tol

inline double rel_diff(double a, double b) {
  double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
  return std::abs(a - b) / scale;
}

}  // namespace relayplan
