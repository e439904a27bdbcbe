#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace miss {

/// n samples of D binary features with one class label each.
///
/// The constant intercept feature is not stored; models carry a bias row.
/// Labels are class indices into `class_names`; the one-hot view is `y(i, k)`.
class BinaryDataset {
 public:
  BinaryDataset() = default;
  BinaryDataset(std::size_t num_samples, std::size_t num_features, std::vector<std::uint8_t> x,
                std::vector<int> labels, std::vector<std::string> feature_names,
                std::vector<std::string> class_names);

  std::size_t num_samples() const { return labels_.size(); }
  std::size_t num_features() const { return num_features_; }
  std::size_t num_classes() const { return class_names_.size(); }

  std::uint8_t x(std::size_t i, std::size_t j) const { return x_[i * num_features_ + j]; }
  std::span<const std::uint8_t> row(std::size_t i) const {
    return {x_.data() + i * num_features_, num_features_};
  }
  int label(std::size_t i) const { return labels_[i]; }
  int y(std::size_t i, std::size_t k) const { return labels_[i] == static_cast<int>(k) ? 1 : 0; }

  const std::vector<std::uint8_t>& features() const { return x_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

  /// Sample count per class.
  std::vector<std::size_t> ClassCounts() const;

  /// Samples `rows`, in the given order.
  BinaryDataset SelectRows(std::span<const std::size_t> rows) const;
  /// Feature columns `columns`, in the given order.
  BinaryDataset SelectFeatures(std::span<const std::size_t> columns) const;

  friend bool operator==(const BinaryDataset&, const BinaryDataset&) = default;

 private:
  std::size_t num_features_ = 0;
  std::vector<std::uint8_t> x_;
  std::vector<int> labels_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
};

/// Randomly duplicates samples of every non-majority class until all classes
/// match the majority count. Original rows come first, unchanged.
BinaryDataset OversampleMinority(const BinaryDataset& ds, std::uint64_t seed);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified k-fold split of `labels` (values in [0, num_classes)).
/// Per-class test counts across folds differ by at most one.
std::vector<Fold> StratifiedFolds(std::span<const int> labels, std::size_t num_classes,
                                  std::size_t k, std::uint64_t seed);

}  // namespace miss
