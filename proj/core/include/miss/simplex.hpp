#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace miss {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Position of a column relative to a simplex basis. For a row, the status
/// describes its activity (the slack column).
enum class BasisStatus : std::uint8_t { kBasic, kAtLower, kAtUpper };

/// A basis to restart from: one status per structural column and per row.
/// Exactly num_rows entries must be kBasic.
struct Basis {
  std::vector<BasisStatus> columns;
  std::vector<BasisStatus> rows;

  bool empty() const { return columns.empty() && rows.empty(); }
};

/// min c'x  s.t.  row_lower <= A x <= row_upper,  lower <= x <= upper.
struct LinearProgram {
  struct Row {
    std::vector<int> index;
    std::vector<double> value;
    double lower = -kInfinity;
    double upper = kInfinity;
  };

  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;
  // Optional starting point for the structural variables (clamped to bounds).
  std::vector<double> start;
  // Optional starting basis; when it is dual feasible the dual simplex runs
  // from it, otherwise the solve starts cold from `start`.
  Basis warm_start;

  int num_variables() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int AddVariable(double c, double lo, double hi);
  void AddRow(std::vector<int> index, std::vector<double> value, double lo, double hi);
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
  kNumericalFailure,
};

std::string_view ToString(LpStatus status);

struct SimplexOptions {
  double primal_tolerance = 1e-9;      // Harris ratio-test slack
  double feasibility_tolerance = 1e-7;  // accepted bound/row violation at the end
  double optimality_tolerance = 1e-9;   // reduced-cost threshold
  double pivot_tolerance = 1e-9;
  int max_iterations = 200000;
  int degenerate_pivots_before_bland = 50;
  int refactor_interval = 100;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct LpResult {
  LpStatus status = LpStatus::kNumericalFailure;
  double objective = 0.0;
  std::vector<double> x;         // structural values
  std::vector<double> activity;  // A x per row
  int iterations = 0;
  double max_violation = 0.0;  // worst bound/row violation of the returned point
  Basis basis;                 // final basis when optimal, otherwise empty
  bool warm_started = false;   // the solve ran from `warm_start`
};

/// Bounded-variable simplex on a dense tableau.
///
/// Cold start: phase 1 minimizes the sum of artificial variables added only
/// for rows the starting point violates. Pricing is Dantzig's rule, switching
/// to Bland's rule after a run of degenerate pivots. Warm start: a dual
/// feasible `warm_start` basis is re-optimized by the dual simplex (a primal
/// feasible one by the primal simplex); any other outcome falls back to the
/// cold start. The basis is refactored with a dense LU every
/// `refactor_interval` pivots and before optimality is declared.
LpResult SolveLinearProgram(const LinearProgram& lp, const SimplexOptions& options = {});

}  // namespace miss
