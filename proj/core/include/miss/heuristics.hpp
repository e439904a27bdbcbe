#pragma once

#include "miss/common.hpp"
#include "miss/constraints.hpp"
#include "miss/dataset.hpp"

namespace miss {

/// Rounds a real coefficient matrix to a feasible integer one.
///
/// Fractional entries are fixed one at a time, most fractional first (ties by
/// lowest index), each to whichever of floor/ceil (clamped to its box) gives
/// the lower objective with the remaining entries held at their current
/// values. Rows are then zeroed, cheapest first, until the size is at most
/// r_max; force-included rows are never zeroed. Rows are activated greedily if
/// r_min or a force-include is still unmet.
IntMatrix SequentialRounding(const RealMatrix& lambda, const BinaryDataset& ds,
                             const SearchSpace& space, double c0);

struct PolishStats {
  int passes = 0;
  int moves = 0;
};

/// 1-opt descent: each pass visits entries row-major and moves each one to
/// the value in its box with the lowest objective, keeping r_min <= size <=
/// r_max and force-included rows nonzero. A move must improve by more than
/// 1e-9; ties go to the lowest value. Stops after a pass with no move or after
/// `max_passes` passes.
IntMatrix PolishOneOpt(const IntMatrix& lambda, const BinaryDataset& ds, const SearchSpace& space,
                       double c0, int max_passes = 50, PolishStats* stats = nullptr);

/// A feasible starting point: lambda = 0 with rows activated greedily (best
/// single-entry objective) until force-includes and r_min hold.
IntMatrix FeasibleSeed(const BinaryDataset& ds, const SearchSpace& space, double c0);

}  // namespace miss
