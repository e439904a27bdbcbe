#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "miss/common.hpp"

namespace miss {

/// User-level restrictions on the coefficient lattice.
struct ConstraintOptions {
  int lambda_min = -5;
  int lambda_max = 5;
  int bias_min = -20;
  int bias_max = 20;
  int r_min = 0;
  int r_max = 5;
  std::vector<std::size_t> force_include;  // feature indices, 0-based
  std::vector<std::size_t> force_exclude;
  std::map<std::size_t, IntBox> feature_boxes;  // overrides lambda_min/max per feature
};

/// The feasible lattice: per-entry integer boxes plus model-size and
/// force-include/exclude restrictions. Entry (j,k) lives at j*K + k, row 0 is
/// the bias. Force-excluded rows have box [0,0].
class SearchSpace {
 public:
  /// Throws InfeasibleError when the restrictions admit no model and Error
  /// when they are malformed. r_max above D is clamped to D.
  SearchSpace(std::size_t num_features, std::size_t num_classes, const ConstraintOptions& options);

  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return num_classes_; }
  std::size_t num_entries() const { return boxes_.size(); }
  std::size_t Index(std::size_t j, std::size_t k) const { return j * num_classes_ + k; }

  const std::vector<IntBox>& boxes() const { return boxes_; }
  const IntBox& box(std::size_t j, std::size_t k) const { return boxes_[Index(j, k)]; }
  int r_min() const { return r_min_; }
  int r_max() const { return r_max_; }
  /// Row indices are 1-based (row j+1 holds feature j).
  bool forced_in(std::size_t row) const { return forced_in_[row]; }
  bool forced_out(std::size_t row) const { return forced_out_[row]; }
  bool RowCanBeNonzero(std::size_t row) const;

  /// Every entry inside `boxes`, r_min <= size <= r_max, forced rows nonzero.
  bool IsFeasible(const IntMatrix& lambda, const std::vector<IntBox>& boxes) const;
  bool IsFeasible(const IntMatrix& lambda) const { return IsFeasible(lambda, boxes_); }
  /// True when lambda = 0 satisfies every restriction.
  bool ZeroIsFeasible() const;

 private:
  std::size_t num_features_;
  std::size_t num_classes_;
  std::vector<IntBox> boxes_;
  int r_min_;
  int r_max_;
  std::vector<bool> forced_in_;   // indexed by row, size D+1
  std::vector<bool> forced_out_;
};

}  // namespace miss
