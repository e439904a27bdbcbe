#include "miss/constraints.hpp"

#include <algorithm>
#include <string>

namespace miss {

SearchSpace::SearchSpace(std::size_t num_features, std::size_t num_classes,
                         const ConstraintOptions& options)
    : num_features_(num_features),
      num_classes_(num_classes),
      boxes_((num_features + 1) * num_classes),
      r_min_(options.r_min),
      r_max_(options.r_max),
      forced_in_(num_features + 1, false),
      forced_out_(num_features + 1, false) {
  if (num_classes < 2) throw Error("constraints: need at least 2 classes");
  if (options.lambda_min > 0 || options.lambda_max < 0) {
    throw Error("constraints: coefficient bounds must contain 0");
  }
  if (options.bias_min > options.bias_max) throw Error("constraints: empty bias bounds");
  if (r_min_ < 0 || r_max_ < 0) throw Error("constraints: negative model size bound");
  const int d = static_cast<int>(num_features);
  r_max_ = std::min(r_max_, d);
  if (r_min_ > r_max_) throw InfeasibleError("constraints: min model size exceeds max model size");

  for (std::size_t k = 0; k < num_classes; ++k) boxes_[k] = IntBox{options.bias_min, options.bias_max};
  for (std::size_t j = 1; j <= num_features; ++j) {
    IntBox b{options.lambda_min, options.lambda_max};
    if (auto it = options.feature_boxes.find(j - 1); it != options.feature_boxes.end()) {
      b = it->second;
      if (b.lo > 0 || b.hi < 0) {
        throw Error("constraints: coefficient bounds of feature " + std::to_string(j - 1) +
                    " must contain 0");
      }
    }
    for (std::size_t k = 0; k < num_classes; ++k) boxes_[Index(j, k)] = b;
  }
  for (std::size_t f : options.force_exclude) {
    if (f >= num_features) throw Error("constraints: force-exclude index out of range");
    forced_out_[f + 1] = true;
    for (std::size_t k = 0; k < num_classes; ++k) boxes_[Index(f + 1, k)] = IntBox{0, 0};
  }
  int included = 0;
  for (std::size_t f : options.force_include) {
    if (f >= num_features) throw Error("constraints: force-include index out of range");
    if (forced_out_[f + 1]) {
      throw InfeasibleError("constraints: feature " + std::to_string(f) +
                            " is both force-included and force-excluded");
    }
    if (!forced_in_[f + 1]) ++included;
    forced_in_[f + 1] = true;
    if (!RowCanBeNonzero(f + 1)) {
      throw InfeasibleError("constraints: force-included feature " + std::to_string(f) +
                            " has coefficient bounds [0,0]");
    }
  }
  if (included > r_max_) {
    throw InfeasibleError("constraints: " + std::to_string(included) +
                          " force-included features exceed max model size " +
                          std::to_string(r_max_));
  }
  int available = 0;
  for (std::size_t j = 1; j <= num_features; ++j) available += RowCanBeNonzero(j) ? 1 : 0;
  if (available < r_min_) {
    throw InfeasibleError("constraints: min model size exceeds the number of usable features");
  }
}

bool SearchSpace::RowCanBeNonzero(std::size_t row) const {
  for (std::size_t k = 0; k < num_classes_; ++k) {
    if (boxes_[Index(row, k)] != IntBox{0, 0}) return true;
  }
  return false;
}

bool SearchSpace::IsFeasible(const IntMatrix& lambda, const std::vector<IntBox>& boxes) const {
  if (static_cast<std::size_t>(lambda.rows()) != num_features_ + 1 ||
      static_cast<std::size_t>(lambda.cols()) != num_classes_) {
    return false;
  }
  int size = 0;
  for (std::size_t j = 0; j <= num_features_; ++j) {
    bool active = false;
    for (std::size_t k = 0; k < num_classes_; ++k) {
      const int v = lambda(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      if (!boxes[Index(j, k)].Contains(v)) return false;
      active = active || v != 0;
    }
    if (j == 0) continue;
    if (forced_in_[j] && !active) return false;
    size += active ? 1 : 0;
  }
  return r_min_ <= size && size <= r_max_;
}

bool SearchSpace::ZeroIsFeasible() const {
  if (r_min_ > 0) return false;
  for (std::size_t j = 1; j <= num_features_; ++j) {
    if (forced_in_[j]) return false;
  }
  for (std::size_t k = 0; k < num_classes_; ++k) {
    if (!boxes_[k].ContainsZero()) return false;
  }
  return true;
}

}  // namespace miss
