#pragma once

#include <cstddef>
#include <vector>

#include "miss/common.hpp"
#include "miss/dataset.hpp"

namespace miss {

// Normalized softmax cross-entropy over linear class scores:
//
//   l(lambda) = (1/n) sum_i [ logsumexp_k s_ik - s_i,y_i ],
//   s_ik      = lambda(0,k) + sum_{j : x_ij = 1} lambda(j,k).
//
// The loss is convex in lambda, so first-order expansions under-estimate it.
// Sums over samples run in index order so results are bit-reproducible.

double LossValue(const RealMatrix& lambda, const BinaryDataset& ds);

/// d l / d lambda(j,k) = (1/n) sum_i xt_ij (r_ik - y_ik), xt_i = [1, x_i].
RealMatrix LossGradient(const RealMatrix& lambda, const BinaryDataset& ds);

/// Value and gradient from one pass over the data.
double LossValueAndGradient(const RealMatrix& lambda, const BinaryDataset& ds,
                            RealMatrix* gradient);

/// Tangent plane of the loss at `anchor`.
struct Cut {
  RealMatrix anchor;
  double value_at_anchor = 0.0;
  RealMatrix gradient;

  /// value_at_anchor + <gradient, lambda - anchor>.
  double Evaluate(const RealMatrix& lambda) const;
  /// value_at_anchor - <gradient, anchor>; the cut is offset + <gradient, lambda>.
  double Offset() const;
};

Cut MakeCut(const RealMatrix& lambda, const BinaryDataset& ds);

/// Objective evaluator supporting cheap single-entry updates.
///
/// Keeps per-sample scores and losses so that changing lambda(j,k) only touches
/// the samples with x_ij = 1 (all samples for the bias row). Used by the
/// rounding and polishing heuristics.
class IncrementalObjective {
 public:
  IncrementalObjective(const BinaryDataset& ds, double c0);

  void Reset(const RealMatrix& lambda);

  const RealMatrix& lambda() const { return lambda_; }
  double loss() const { return loss_sum_ / static_cast<double>(num_samples_); }
  int model_size() const { return model_size_; }
  double value() const { return loss() + c0_ * model_size_; }
  bool RowActive(std::size_t j) const { return row_nonzeros_[j] > 0; }

  /// Objective after setting lambda(j,k) = v, without committing.
  double ValueIfSet(std::size_t j, std::size_t k, double v) const;
  /// Objective change after setting lambda(j,k) = v, without committing.
  double DeltaIfSet(std::size_t j, std::size_t k, double v) const;
  /// Model size after setting lambda(j,k) = v.
  int ModelSizeIfSet(std::size_t j, std::size_t k, double v) const;

  void Set(std::size_t j, std::size_t k, double v);

 private:
  double SampleLoss(const double* scores, int label) const;
  const std::vector<std::size_t>& AffectedRows(std::size_t j) const;
  void RecomputeLossSum();

  const BinaryDataset& ds_;
  double c0_;
  std::size_t num_samples_;
  std::size_t num_classes_;
  std::vector<std::vector<std::size_t>> rows_by_feature_;  // index 0 = all rows
  RealMatrix lambda_;
  std::vector<double> scores_;  // n x K, row-major
  std::vector<double> sample_loss_;
  std::vector<int> row_nonzeros_;
  double loss_sum_ = 0.0;
  int model_size_ = 0;
  mutable std::vector<double> scratch_;
};

}  // namespace miss
