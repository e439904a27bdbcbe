#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "miss/common.hpp"
#include "miss/constraints.hpp"
#include "miss/dataset.hpp"
#include "miss/model.hpp"

namespace miss {

struct ProgressEvent {
  double elapsed_seconds = 0.0;
  long nodes = 0;
  double v_min = 0.0;
  double v_max = 0.0;
  double gap = 1.0;
};

/// "elapsed=... nodes=... v_min=... v_max=... gap=..."
std::string FormatProgress(const ProgressEvent& event);

struct SolverConfig {
  double c0 = 1e-6;
  ConstraintOptions constraints;
  double gap_tolerance = 0.0;
  double time_limit_seconds = 5400.0;
  long node_limit = -1;  // negative: unlimited
  double integrality_tolerance = 1e-6;
  std::uint64_t seed = 0;
  bool use_rounding = true;
  bool use_polishing = true;
  bool use_bound_tightening = true;
  /// Restrict the search to one representative per row shift (see LpRelaxation).
  bool symmetry_breaking = true;
  int cut_budget = 5;  // consecutive cut-and-resolve rounds per node
  /// Cutting-plane rounds on the root LP before branching; tangents there
  /// are taken at the (possibly fractional) LP solution.
  int root_cut_rounds = 1000;
  double root_cut_time_fraction = 0.3;  // share of the time limit they may use
  /// Called once per incumbent or lower-bound improvement.
  std::function<void(const ProgressEvent&)> progress;
};

enum class SolveStatus { kOptimal, kGapReached, kTimeout, kNodeLimit };

std::string_view ToString(SolveStatus status);

struct SolveStats {
  long nodes_processed = 0;
  long cuts_added = 0;
  long lp_solves = 0;
  long lp_failures = 0;
  long heuristic_improvements = 0;
  double wall_time_seconds = 0.0;
};

struct SolveResult {
  IntMatrix lambda;
  double v_max = 0.0;  // incumbent objective
  double v_min = 0.0;  // global lower bound
  double gap = 1.0;
  double loss = 0.0;  // incumbent loss
  SolveStatus status = SolveStatus::kTimeout;
  SolveStats stats;

  /// Wraps the incumbent with the dataset's names and the config's metadata.
  MissModel ToModel(const BinaryDataset& ds, const SolverConfig& cfg) const;
};

/// Branch-and-bound over the integer coefficient lattice. Each node solves
/// the surrogate LP over its boxes; tangent cuts of the loss are added at
/// integer points and shared by all nodes. Nodes are explored best bound
/// first (FIFO among equal bounds). Deterministic unless a time limit fires.
///
/// Throws InfeasibleError when the constraints admit no model.
SolveResult SolveMiss(const BinaryDataset& ds, const SolverConfig& cfg);

/// Entry whose value has fractional part closest to 0.5, ties by lowest
/// (j,k). Throws Error when every entry is within `tolerance` of an integer.
std::pair<std::size_t, std::size_t> SelectBranchEntry(const RealMatrix& lambda,
                                                      double tolerance = 1e-6);

/// 1 - v_min / v_max clamped to [0,1]; 0 when v_max = 0. Throws on negatives.
double OptimalityGap(double v_min, double v_max);

}  // namespace miss
