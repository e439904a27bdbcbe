#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "miss/dataset.hpp"
#include "miss/solver.hpp"

namespace miss {

struct RfaConfig {
  std::size_t f = 0;  // features to choose
  /// Template for the inner solves. r_min/r_max are overridden to 0/1, force
  /// lists are ignored and feature boxes are remapped onto the working set.
  SolverConfig inner;
  /// Total budget; each inner solve gets budget / f.
  double time_budget_seconds = 60.0;
  /// Called after each selection with (iteration, feature index, used fallback).
  std::function<void(std::size_t, std::size_t, bool)> on_select;
};

/// Recursive feature aggregation: repeatedly trains a one-feature model on the
/// features not yet chosen and moves its active feature into the pool. When
/// an inner model is bias-only, the feature whose best single-entry
/// activation lowers the objective most is taken instead.
///
/// Returns min(f, D) distinct indices in selection order, or all indices in
/// their original order when D <= f.
std::vector<std::size_t> RfaSelect(const BinaryDataset& ds, const RfaConfig& cfg);

}  // namespace miss
