#pragma once

// Reference implementations used only by tests. They share no code with the
// library beyond the dataset container.

#include <cstdint>
#include <random>
#include <vector>

#include "miss/common.hpp"
#include "miss/dataset.hpp"

namespace miss::testing {

/// Random binary dataset; labels come from a random integer model plus noise,
/// and every class appears at least `min_per_class` times.
BinaryDataset RandomDataset(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed,
                            std::size_t min_per_class = 1);

/// Direct evaluation of (1/n) sum_i [log sum_k exp(s_ik) - s_i,y_i].
double NaiveLoss(const RealMatrix& lambda, const BinaryDataset& ds);
double NaiveObjective(const IntMatrix& lambda, const BinaryDataset& ds, double c0);

/// Central finite differences of NaiveLoss with step h.
RealMatrix FiniteDifferenceGradient(const RealMatrix& lambda, const BinaryDataset& ds, double h);

struct LatticeOptimum {
  double value = 0.0;
  IntMatrix lambda;
};

/// Exhaustive minimum of loss + c0 * size over integer lambda with feature
/// entries in [lo, hi], bias entries in [bias_lo, bias_hi] and size <= r_max.
///
/// Adding a constant to a whole row leaves the loss unchanged, so each row is
/// enumerated by its differences to class 0; a row costs c0 unless its
/// differences vanish (then it can be all zeros). Samples are pooled by
/// feature pattern and log-sum-exp values come from a table over integer
/// score differences. Practical for D <= 3, K <= 3.
LatticeOptimum BruteForceOptimum(const BinaryDataset& ds, int lo, int hi, int bias_lo, int bias_hi,
                                 double c0, int r_max);

/// Plain enumeration of every lambda in the boxes; tiny instances only.
LatticeOptimum FullEnumeration(const BinaryDataset& ds, int lo, int hi, int bias_lo, int bias_hi,
                               double c0, int r_max);

/// min c'x over {x in R^n : a_i . x <= b_i} by solving every n-subset of the
/// constraints as equalities and keeping the feasible vertices. Assumes the
/// region is bounded; returns false when no feasible vertex exists.
bool VertexEnumerationLp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                         const std::vector<double>& c, double* value);

}  // namespace miss::testing
