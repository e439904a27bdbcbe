#include "miss/binarizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "miss/common.hpp"

namespace miss {
namespace {

using nlohmann::json;

std::vector<double> ObservedValues(const RawColumn& column) {
  std::vector<double> values;
  values.reserve(column.numbers.size());
  for (const auto& v : column.numbers) {
    if (v) values.push_back(*v);
  }
  return values;
}

std::vector<double> UniformCuts(double lo, double hi, int n_bins) {
  std::vector<double> cuts;
  const double width = (hi - lo) / n_bins;
  for (int i = 1; i < n_bins; ++i) cuts.push_back(lo + width * i);
  return cuts;
}

std::vector<double> QuantileCuts(const std::vector<double>& values, int n_bins) {
  std::vector<double> cuts;
  for (int i = 1; i < n_bins; ++i) {
    cuts.push_back(Quantile(values, static_cast<double>(i) / n_bins));
  }
  return cuts;
}

// 1-D Lloyd iterations from k-means++ seeds; returns midpoints between the
// sorted centroids.
std::vector<double> KMeansCuts(std::vector<double> values, int n_bins, std::uint64_t seed) {
  constexpr int kMaxIterations = 100;
  constexpr double kTolerance = 1e-9;

  std::sort(values.begin(), values.end());
  std::mt19937_64 rng(seed);
  std::vector<double> centers;
  std::uniform_int_distribution<std::size_t> first(0, values.size() - 1);
  centers.push_back(values[first(rng)]);

  std::vector<double> dist2(values.size());
  while (static_cast<int>(centers.size()) < n_bins) {
    double total = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (values[i] - c) * (values[i] - c));
      dist2[i] = best;
      total += best;
    }
    if (total <= 0.0) break;  // fewer distinct values than bins
    std::uniform_real_distribution<double> draw(0.0, total);
    double target = draw(rng);
    std::size_t pick = values.size() - 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
      target -= dist2[i];
      if (target < 0.0 && dist2[i] > 0.0) {
        pick = i;
        break;
      }
    }
    if (dist2[pick] <= 0.0) break;
    centers.push_back(values[pick]);
  }

  const std::size_t k = centers.size();
  std::vector<double> sums(k);
  std::vector<std::size_t> counts(k);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (double v : values) {
      std::size_t best = 0;
      for (std::size_t c = 1; c < k; ++c) {
        if (std::abs(v - centers[c]) < std::abs(v - centers[best])) best = c;
      }
      sums[best] += v;
      ++counts[best];
    }
    double moved = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      double updated = sums[c] / static_cast<double>(counts[c]);
      moved = std::max(moved, std::abs(updated - centers[c]));
      centers[c] = updated;
    }
    if (moved < kTolerance) break;
  }

  std::sort(centers.begin(), centers.end());
  std::vector<double> cuts;
  for (std::size_t c = 1; c < k; ++c) cuts.push_back(0.5 * (centers[c - 1] + centers[c]));
  return cuts;
}

std::vector<double> CleanCuts(std::vector<double> cuts, double lo, double hi) {
  std::erase_if(cuts, [&](double c) { return !(c > lo && c < hi); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

std::string IntervalName(const std::string& feature, const NumericSpec& spec, std::size_t i) {
  const auto& cuts = spec.cut_points;
  const double lo = i == 0 ? spec.observed_min : cuts[i - 1];
  const bool last = i == cuts.size();
  const double hi = last ? spec.observed_max : cuts[i];
  return FormatBound(lo) + " <= " + feature + (last ? " <= " : " < ") + FormatBound(hi);
}

std::string MissingName(const std::string& feature) {
  return feature + "=" + std::string(kMissingLevel);
}

}  // namespace

std::string_view ToString(BinningStrategy strategy) {
  switch (strategy) {
    case BinningStrategy::kUniform:
      return "uniform";
    case BinningStrategy::kQuantile:
      return "quantile";
    case BinningStrategy::kKMeans:
      return "kmeans";
  }
  return "unknown";
}

BinningStrategy ParseBinningStrategy(std::string_view text) {
  if (text == "uniform") return BinningStrategy::kUniform;
  if (text == "quantile") return BinningStrategy::kQuantile;
  if (text == "kmeans") return BinningStrategy::kKMeans;
  throw Error("unknown discretizer '" + std::string(text) + "'");
}

std::vector<std::string> CategoricalSpec::Levels() const {
  auto levels = categories;
  if (has_missing) levels.emplace_back(kMissingLevel);
  return levels;
}

std::size_t NumericSpec::IntervalOf(double value) const {
  // upper_bound: the interval [c_i, c_{i+1}) owns c_i.
  auto it = std::upper_bound(cut_points.begin(), cut_points.end(), value);
  return static_cast<std::size_t>(it - cut_points.begin());
}

double Quantile(std::vector<double> values, double p) {
  if (values.empty()) throw Error("quantile of empty sample");
  std::sort(values.begin(), values.end());
  const double h = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string FormatBound(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6g", value);
  std::string text = buffer;
  if (text.find_first_of(".eni") == std::string::npos) text += ".0";
  return text;
}

std::vector<std::string> BinarizationSchema::BinaryFeatureNames() const {
  std::vector<std::string> names;
  for (const auto& feature : features) {
    if (const auto* numeric = std::get_if<NumericSpec>(&feature.spec)) {
      if (!numeric->cut_points.empty()) {
        for (std::size_t i = 0; i < numeric->num_intervals(); ++i) {
          names.push_back(IntervalName(feature.name, *numeric, i));
        }
      }
      if (numeric->has_missing) names.push_back(MissingName(feature.name));
    } else {
      for (const auto& level : std::get<CategoricalSpec>(feature.spec).Levels()) {
        names.push_back(feature.name + "=" + level);
      }
    }
  }
  return names;
}

std::vector<std::size_t> BinarizationSchema::BinaryFeatureGroups() const {
  std::vector<std::size_t> groups;
  for (std::size_t f = 0; f < features.size(); ++f) {
    std::size_t width = 0;
    if (const auto* numeric = std::get_if<NumericSpec>(&features[f].spec)) {
      width = (numeric->cut_points.empty() ? 0 : numeric->num_intervals()) +
              (numeric->has_missing ? 1 : 0);
    } else {
      width = std::get<CategoricalSpec>(features[f].spec).Levels().size();
    }
    groups.insert(groups.end(), width, f);
  }
  return groups;
}

bool operator==(const BinarizationSchema& a, const BinarizationSchema& b) {
  if (a.features.size() != b.features.size()) return false;
  for (std::size_t f = 0; f < a.features.size(); ++f) {
    const auto& fa = a.features[f];
    const auto& fb = b.features[f];
    if (fa.name != fb.name || fa.spec.index() != fb.spec.index()) return false;
    if (const auto* na = std::get_if<NumericSpec>(&fa.spec)) {
      const auto& nb = std::get<NumericSpec>(fb.spec);
      if (na->strategy != nb.strategy || na->cut_points != nb.cut_points ||
          na->observed_min != nb.observed_min || na->observed_max != nb.observed_max ||
          na->has_missing != nb.has_missing) {
        return false;
      }
    } else {
      const auto& ca = std::get<CategoricalSpec>(fa.spec);
      const auto& cb = std::get<CategoricalSpec>(fb.spec);
      if (ca.categories != cb.categories || ca.has_missing != cb.has_missing) return false;
    }
  }
  return true;
}

std::string BinarizationSchema::ToJson() const {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json list = json::array();
  for (const auto& feature : features) {
    json item;
    item["name"] = feature.name;
    if (const auto* numeric = std::get_if<NumericSpec>(&feature.spec)) {
      item["type"] = "numeric";
      item["strategy"] = std::string(ToString(numeric->strategy));
      item["cut_points"] = numeric->cut_points;
      item["observed_min"] = numeric->observed_min;
      item["observed_max"] = numeric->observed_max;
      item["has_missing"] = numeric->has_missing;
    } else {
      const auto& categorical = std::get<CategoricalSpec>(feature.spec);
      item["type"] = "categorical";
      item["categories"] = categorical.categories;
      item["has_missing"] = categorical.has_missing;
    }
    list.push_back(std::move(item));
  }
  doc["features"] = std::move(list);
  return doc.dump(2);
}

BinarizationSchema BinarizationSchema::FromJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("binarizer schema: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("schema_version").get<int>() != kSchemaVersion) {
      throw Error("binarizer schema: unsupported schema_version");
    }
    BinarizationSchema schema;
    for (const auto& item : doc.at("features")) {
      FeatureSpec feature;
      feature.name = item.at("name").get<std::string>();
      const auto type = item.at("type").get<std::string>();
      if (type == "numeric") {
        NumericSpec spec;
        spec.strategy = ParseBinningStrategy(item.at("strategy").get<std::string>());
        spec.cut_points = item.at("cut_points").get<std::vector<double>>();
        spec.observed_min = item.at("observed_min").get<double>();
        spec.observed_max = item.at("observed_max").get<double>();
        spec.has_missing = item.value("has_missing", false);
        for (std::size_t i = 0; i < spec.cut_points.size(); ++i) {
          const double c = spec.cut_points[i];
          if (!(c > spec.observed_min && c < spec.observed_max) ||
              (i > 0 && !(c > spec.cut_points[i - 1]))) {
            throw Error("binarizer schema: invalid cut points for '" + feature.name + "'");
          }
        }
        feature.spec = std::move(spec);
      } else if (type == "categorical") {
        CategoricalSpec spec;
        spec.categories = item.at("categories").get<std::vector<std::string>>();
        spec.has_missing = item.value("has_missing", false);
        std::set<std::string> distinct(spec.categories.begin(), spec.categories.end());
        if (distinct.size() != spec.categories.size()) {
          throw Error("binarizer schema: duplicate categories for '" + feature.name + "'");
        }
        feature.spec = std::move(spec);
      } else {
        throw Error("binarizer schema: unknown feature type '" + type + "'");
      }
      schema.features.push_back(std::move(feature));
    }
    return schema;
  } catch (const json::exception& e) {
    throw Error(std::string("binarizer schema: ") + e.what());
  }
}

BinarizationSchema FitBinarizer(const RawTable& table, BinningStrategy strategy, int n_bins,
                                std::uint64_t seed) {
  if (n_bins < 2) throw Error("binarizer: n_bins must be at least 2");
  if (table.num_rows() == 0) throw Error("binarizer: empty table");

  BinarizationSchema schema;
  for (const auto& column : table.columns) {
    FeatureSpec feature;
    feature.name = column.name;
    bool has_missing = false;
    for (std::size_t r = 0; r < column.cells.size(); ++r) has_missing |= column.IsMissing(r);

    if (column.kind == ColumnKind::kNumeric) {
      NumericSpec spec;
      spec.strategy = strategy;
      spec.has_missing = has_missing;
      auto values = ObservedValues(column);
      if (!values.empty()) {
        auto [lo, hi] = std::minmax_element(values.begin(), values.end());
        spec.observed_min = *lo;
        spec.observed_max = *hi;
        std::vector<double> cuts;
        switch (strategy) {
          case BinningStrategy::kUniform:
            cuts = UniformCuts(spec.observed_min, spec.observed_max, n_bins);
            break;
          case BinningStrategy::kQuantile:
            cuts = QuantileCuts(values, n_bins);
            break;
          case BinningStrategy::kKMeans:
            cuts = KMeansCuts(values, n_bins, seed);
            break;
        }
        spec.cut_points = CleanCuts(std::move(cuts), spec.observed_min, spec.observed_max);
      }
      if (spec.cut_points.empty()) {
        schema.warnings.push_back("column '" + column.name +
                                  "' is constant; it emits no interval features");
      }
      feature.spec = std::move(spec);
    } else {
      CategoricalSpec spec;
      std::set<std::string> levels;
      for (const auto& cell : column.cells) {
        if (cell) levels.insert(*cell);
      }
      spec.categories.assign(levels.begin(), levels.end());
      spec.has_missing = has_missing;
      feature.spec = std::move(spec);
    }
    schema.features.push_back(std::move(feature));
  }
  return schema;
}

BinaryDataset ApplyBinarizer(const RawTable& table, const BinarizationSchema& schema,
                             const std::vector<std::string>& class_names) {
  const std::size_t n = table.num_rows();
  const auto names = schema.BinaryFeatureNames();
  const std::size_t d = names.size();
  std::vector<std::uint8_t> x(n * d, 0);

  std::size_t offset = 0;
  for (const auto& feature : schema.features) {
    const RawColumn* column = table.FindColumn(feature.name);
    if (column == nullptr) {
      throw Error("binarizer: column '" + feature.name + "' missing from table");
    }
    if (const auto* numeric = std::get_if<NumericSpec>(&feature.spec)) {
      if (column->kind != ColumnKind::kNumeric) {
        throw Error("binarizer: column '" + feature.name + "' is not numeric");
      }
      const std::size_t intervals = numeric->cut_points.empty() ? 0 : numeric->num_intervals();
      for (std::size_t i = 0; i < n; ++i) {
        const auto& value = column->numbers[i];
        if (!value) {
          if (numeric->has_missing) x[i * d + offset + intervals] = 1;
          continue;
        }
        if (intervals > 0) x[i * d + offset + numeric->IntervalOf(*value)] = 1;
      }
      offset += intervals + (numeric->has_missing ? 1 : 0);
    } else {
      const auto& categorical = std::get<CategoricalSpec>(feature.spec);
      std::map<std::string, std::size_t> position;
      for (std::size_t c = 0; c < categorical.categories.size(); ++c) {
        position.emplace(categorical.categories[c], c);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& cell = column->cells[i];
        if (!cell) {
          if (categorical.has_missing) x[i * d + offset + categorical.categories.size()] = 1;
          continue;
        }
        auto it = position.find(*cell);
        if (it != position.end()) x[i * d + offset + it->second] = 1;
      }
      offset += categorical.categories.size() + (categorical.has_missing ? 1 : 0);
    }
  }

  std::vector<std::string> classes = class_names;
  std::vector<int> labels(n, 0);
  if (table.has_labels()) {
    if (classes.empty()) classes = table.DistinctLabels();
    std::map<std::string, int> index;
    for (std::size_t k = 0; k < classes.size(); ++k) index.emplace(classes[k], static_cast<int>(k));
    for (std::size_t i = 0; i < n; ++i) {
      auto it = index.find(table.labels[i]);
      if (it == index.end()) throw Error("binarizer: unknown class '" + table.labels[i] + "'");
      labels[i] = it->second;
    }
  } else if (classes.empty()) {
    throw Error("binarizer: class names required for an unlabeled table");
  }
  return BinaryDataset(n, d, std::move(x), std::move(labels), names, std::move(classes));
}

}  // namespace miss
