#include "miss/dataset.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "miss/common.hpp"

namespace miss {

BinaryDataset::BinaryDataset(std::size_t num_samples, std::size_t num_features,
                             std::vector<std::uint8_t> x, std::vector<int> labels,
                             std::vector<std::string> feature_names,
                             std::vector<std::string> class_names)
    : num_features_(num_features),
      x_(std::move(x)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
  if (x_.size() != num_samples * num_features) throw Error("dataset: feature matrix size mismatch");
  if (labels_.size() != num_samples) throw Error("dataset: label count mismatch");
  if (feature_names_.size() != num_features) throw Error("dataset: feature name count mismatch");
  if (class_names_.empty()) throw Error("dataset: no classes");
  for (auto v : x_) {
    if (v > 1) throw Error("dataset: feature values must be 0 or 1");
  }
  const int k = static_cast<int>(class_names_.size());
  for (int label : labels_) {
    if (label < 0 || label >= k) throw Error("dataset: label out of range");
  }
}

std::vector<std::size_t> BinaryDataset::ClassCounts() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (int label : labels_) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

BinaryDataset BinaryDataset::SelectRows(std::span<const std::size_t> rows) const {
  std::vector<std::uint8_t> x;
  x.reserve(rows.size() * num_features_);
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= num_samples()) throw Error("dataset: row index out of range");
    auto src = row(r);
    x.insert(x.end(), src.begin(), src.end());
    labels.push_back(labels_[r]);
  }
  return BinaryDataset(rows.size(), num_features_, std::move(x), std::move(labels),
                       feature_names_, class_names_);
}

BinaryDataset BinaryDataset::SelectFeatures(std::span<const std::size_t> columns) const {
  for (std::size_t c : columns) {
    if (c >= num_features_) throw Error("dataset: feature index out of range");
  }
  const std::size_t n = num_samples();
  std::vector<std::uint8_t> x;
  x.reserve(n * columns.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c : columns) x.push_back(this->x(i, c));
  }
  std::vector<std::string> names;
  names.reserve(columns.size());
  for (std::size_t c : columns) names.push_back(feature_names_[c]);
  return BinaryDataset(n, columns.size(), std::move(x), labels_, std::move(names), class_names_);
}

BinaryDataset OversampleMinority(const BinaryDataset& ds, std::uint64_t seed) {
  const std::size_t k = ds.num_classes();
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < ds.num_samples(); ++i) {
    members[static_cast<std::size_t>(ds.label(i))].push_back(i);
  }
  std::size_t target = 0;
  for (const auto& m : members) {
    if (m.empty()) throw Error("oversample: every class needs at least one sample");
    target = std::max(target, m.size());
  }

  std::vector<std::size_t> rows(ds.num_samples());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (const auto& m : members) {
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    for (std::size_t extra = m.size(); extra < target; ++extra) rows.push_back(m[pick(rng)]);
  }
  return ds.SelectRows(rows);
}

std::vector<Fold> StratifiedFolds(std::span<const int> labels, std::size_t num_classes,
                                  std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error("folds: k must be at least 2");
  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto label = labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes) {
      throw Error("folds: label out of range");
    }
    members[static_cast<std::size_t>(label)].push_back(i);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (members[c].size() < k) {
      throw Error("folds: class " + std::to_string(c) + " has fewer than " + std::to_string(k) +
                  " samples");
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::size_t>> tests(k);
  std::size_t next_fold = 0;
  for (auto& m : members) {
    std::shuffle(m.begin(), m.end(), rng);
    // Round-robin continues across classes so fold sizes stay balanced.
    for (std::size_t idx : m) {
      tests[next_fold].push_back(idx);
      next_fold = (next_fold + 1) % k;
    }
  }

  std::vector<Fold> folds(k);
  std::vector<std::size_t> owner(labels.size());
  for (std::size_t f = 0; f < k; ++f) {
    std::sort(tests[f].begin(), tests[f].end());
    for (std::size_t idx : tests[f]) owner[idx] = f;
    folds[f].test = std::move(tests[f]);
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      if (owner[i] != f) folds[f].train.push_back(i);
    }
  }
  return folds;
}

}  // namespace miss
