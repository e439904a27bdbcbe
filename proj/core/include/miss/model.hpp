#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "miss/binarizer.hpp"
#include "miss/common.hpp"
#include "miss/dataset.hpp"

namespace miss {

struct ModelMeta {
  double c0 = 1e-6;
  int lambda_min = -5;
  int lambda_max = 5;
  int bias_min = -20;
  int bias_max = 20;
  int r_max = 5;
  double objective = 0.0;
  double loss = 0.0;
  double optimality_gap = 1.0;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelMeta&, const ModelMeta&) = default;
};

/// A multiclass scoring system: integer points per (binary feature, class)
/// plus a per-class bias. Immutable once constructed.
class MissModel {
 public:
  /// Validates box bounds, model size and gap; throws Error on violation.
  MissModel(IntMatrix lambda, std::vector<std::string> feature_names,
            std::vector<std::string> class_names, ModelMeta meta,
            std::optional<BinarizationSchema> binarizer = std::nullopt);

  const IntMatrix& lambda() const { return lambda_; }
  std::size_t num_features() const { return feature_names_.size(); }
  std::size_t num_classes() const { return class_names_.size(); }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const ModelMeta& meta() const { return meta_; }
  /// Schema turning raw CSV columns into this model's features, when known.
  const std::optional<BinarizationSchema>& binarizer() const { return binarizer_; }

  /// Binarizes `table` and keeps the model's columns, matched by name.
  /// Labels map onto class_names(). Throws Error without a binarizer or when
  /// a model feature is not among the emitted columns.
  BinaryDataset Encode(const RawTable& table) const;

  /// s_k = bias_k + sum of points of the active features.
  std::vector<long> Scores(std::span<const std::uint8_t> x) const;
  /// Class with the highest score; ties go to the lowest class index.
  int Predict(std::span<const std::uint8_t> x) const;
  /// Softmax of the scores.
  std::vector<double> PredictProba(std::span<const std::uint8_t> x) const;

  friend bool operator==(const MissModel& a, const MissModel& b);

 private:
  void CheckDimension(std::span<const std::uint8_t> x) const;

  IntMatrix lambda_;
  std::vector<std::string> feature_names_;
  std::vector<std::string> class_names_;
  ModelMeta meta_;
  std::optional<BinarizationSchema> binarizer_;
};

/// Number of feature rows (bias row excluded) with any nonzero entry.
int ModelSize(const IntMatrix& lambda);
int ModelSize(const RealMatrix& lambda);

/// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> scores);
/// Index of the maximum; ties go to the lowest index.
int ArgMax(std::span<const long> scores);

struct ObjectiveValue {
  double loss = 0.0;
  double penalty = 0.0;
  double value = 0.0;
};

/// loss(lambda; ds) + c0 * ModelSize(lambda).
ObjectiveValue Objective(const MissModel& model, const BinaryDataset& ds);

enum class ScorecardFormat { kText, kMarkdown };

/// Table with one row per used feature, a "+ bias" row and a "Score:" row.
std::string RenderScorecard(const MissModel& model, ScorecardFormat format);

/// JSON model file (schema_version 1).
std::string Serialize(const MissModel& model);
MissModel Deserialize(std::string_view text);

}  // namespace miss
