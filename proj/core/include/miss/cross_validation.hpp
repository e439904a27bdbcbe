#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "miss/binarizer.hpp"
#include "miss/csv.hpp"
#include "miss/model.hpp"
#include "miss/solver.hpp"

namespace miss {

struct PipelineConfig {
  BinningStrategy strategy = BinningStrategy::kQuantile;
  int n_bins = 3;
  SolverConfig solver;  // time_limit_seconds is the whole training budget
  std::size_t rfa_features = 0;  // 0 disables feature aggregation
  /// Binary feature names resolved after binarization; they override the
  /// index lists in solver.constraints.
  std::vector<std::string> force_include;
  std::vector<std::string> force_exclude;
  std::uint64_t seed = 0;
  /// Receives human-readable progress lines.
  std::function<void(std::string_view)> log;
};

struct TrainOutcome {
  MissModel model;
  SolveResult result;
  std::size_t num_binary_features = 0;      // before feature selection
  std::vector<std::size_t> selected;        // kept binary columns, ascending
  bool rfa_applied = false;
};

/// fit binarizer -> binarize -> oversample minority -> optional feature
/// aggregation -> solve. With aggregation active, a third of the time budget
/// goes to selection and the rest to the final solve.
TrainOutcome TrainPipeline(const RawTable& train, const PipelineConfig& cfg);

struct FoldReport {
  std::size_t fold = 0;
  std::size_t num_train = 0;
  std::size_t num_test = 0;
  double f1 = 0.0;
  double auc = 0.0;
  double ece = 0.0;
  double optimality_gap = 1.0;
  double objective = 0.0;
  int model_size = 0;
  std::string status;
  std::vector<std::size_t> test_indices;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for one fold
};

struct CvReport {
  std::vector<FoldReport> folds;
  MetricSummary f1, auc, ece, optimality_gap;

  /// Deterministic JSON (no timings).
  std::string ToJson() const;
  /// Aligned table with one row per fold and a mean +- std row.
  std::string ToText() const;
};

/// Stratified k-fold evaluation; every fold trains on its own split only.
CvReport CrossValidate(const RawTable& table, const PipelineConfig& cfg, std::size_t k);

MetricSummary Summarize(const std::vector<double>& values);

}  // namespace miss
