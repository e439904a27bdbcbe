#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "miss/csv.hpp"
#include "miss/dataset.hpp"

namespace miss {

enum class BinningStrategy { kUniform, kQuantile, kKMeans };

std::string_view ToString(BinningStrategy strategy);
BinningStrategy ParseBinningStrategy(std::string_view text);

/// Reserved level for absent categorical values.
inline constexpr std::string_view kMissingLevel = "MISSING";

struct CategoricalSpec {
  std::vector<std::string> categories;  // sorted, distinct, observed values
  bool has_missing = false;             // adds the MISSING level after `categories`

  /// Emitted levels: `categories` followed by MISSING when present.
  std::vector<std::string> Levels() const;
};

struct NumericSpec {
  BinningStrategy strategy = BinningStrategy::kQuantile;
  std::vector<double> cut_points;  // strictly increasing, inside (observed_min, observed_max)
  double observed_min = 0.0;
  double observed_max = 0.0;
  bool has_missing = false;  // emits a trailing "<name>=MISSING" indicator column

  std::size_t num_intervals() const { return cut_points.size() + 1; }
  /// Interval index for `value`, clamping values outside the observed range.
  std::size_t IntervalOf(double value) const;
};

struct FeatureSpec {
  std::string name;
  std::variant<CategoricalSpec, NumericSpec> spec;

  bool is_numeric() const { return std::holds_alternative<NumericSpec>(spec); }
};

/// Per-raw-feature transform from a RawTable to binary columns.
///
/// A numeric feature with cut points c1 < ... < cm emits the intervals
/// [min, c1), [c1, c2), ..., [cm, max], unless it has no cut points, in which
/// case it emits nothing. A categorical feature emits one column per level.
struct BinarizationSchema {
  static constexpr int kSchemaVersion = 1;

  std::vector<FeatureSpec> features;
  std::vector<std::string> warnings;  // fit-time notes, e.g. constant columns

  /// Names of the emitted binary columns, e.g. "0.8 <= petal_width < 1.75".
  std::vector<std::string> BinaryFeatureNames() const;
  /// Index of the raw feature each binary column came from.
  std::vector<std::size_t> BinaryFeatureGroups() const;

  std::string ToJson() const;
  static BinarizationSchema FromJson(std::string_view text);

  friend bool operator==(const BinarizationSchema& a, const BinarizationSchema& b);
};

/// Learns cut points / categories from `table`.
/// kmeans uses Lloyd's algorithm seeded with k-means++ under `seed`.
BinarizationSchema FitBinarizer(const RawTable& table, BinningStrategy strategy, int n_bins,
                                std::uint64_t seed = 0);

/// Encodes `table` with `schema`. Labels are mapped onto `class_names`; when
/// empty, the sorted distinct labels of `table` are used. Tables without
/// labels produce an all-zero label vector with `class_names` kept as given.
BinaryDataset ApplyBinarizer(const RawTable& table, const BinarizationSchema& schema,
                             const std::vector<std::string>& class_names = {});

/// Empirical quantile with linear interpolation between order statistics.
double Quantile(std::vector<double> values, double p);

/// Formats an interval bound the way feature names print it ("1.0", "2.5").
std::string FormatBound(double value);

}  // namespace miss
