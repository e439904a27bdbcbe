#include "miss/cross_validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "miss/metrics.hpp"
#include "miss/rfa.hpp"

namespace miss {
namespace {

using Clock = std::chrono::steady_clock;

std::size_t ResolveFeature(const std::vector<std::string>& names, const std::string& wanted) {
  auto it = std::find(names.begin(), names.end(), wanted);
  if (it == names.end()) throw Error("pipeline: unknown binary feature '" + wanted + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void Log(const PipelineConfig& cfg, const std::string& line) {
  if (cfg.log) cfg.log(line);
}

}  // namespace

MetricSummary Summarize(const std::vector<double>& values) {
  MetricSummary s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

TrainOutcome TrainPipeline(const RawTable& train, const PipelineConfig& cfg) {
  const auto start = Clock::now();
  BinarizationSchema schema = FitBinarizer(train, cfg.strategy, cfg.n_bins, cfg.seed);
  for (const auto& w : schema.warnings) Log(cfg, "binarizer: " + w);
  const BinaryDataset full = OversampleMinority(ApplyBinarizer(train, schema), cfg.seed);
  const std::size_t d = full.num_features();
  if (d == 0) throw Error("pipeline: binarization produced no features");

  std::vector<bool> forced_in(d, false);
  std::vector<bool> forced_out(d, false);
  for (std::size_t f : cfg.solver.constraints.force_include) {
    if (f >= d) throw Error("pipeline: force-include index out of range");
    forced_in[f] = true;
  }
  for (std::size_t f : cfg.solver.constraints.force_exclude) {
    if (f >= d) throw Error("pipeline: force-exclude index out of range");
    forced_out[f] = true;
  }
  for (const auto& name : cfg.force_include) forced_in[ResolveFeature(full.feature_names(), name)] = true;
  for (const auto& name : cfg.force_exclude) forced_out[ResolveFeature(full.feature_names(), name)] = true;

  bool rfa_applied = false;
  SolverConfig solver = cfg.solver;
  const double budget = cfg.solver.time_limit_seconds;

  std::vector<std::size_t> selected(d);
  std::iota(selected.begin(), selected.end(), std::size_t{0});
  if (cfg.rfa_features > 0 && d > cfg.rfa_features) {
    // Excluded features never enter the pool; forced ones are added afterwards.
    std::vector<std::size_t> candidates;
    for (std::size_t j = 0; j < d; ++j) {
      if (!forced_out[j]) candidates.push_back(j);
    }
    RfaConfig rfa;
    rfa.f = cfg.rfa_features;
    rfa.inner = cfg.solver;
    rfa.inner.constraints.feature_boxes.clear();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      auto found = cfg.solver.constraints.feature_boxes.find(candidates[c]);
      if (found != cfg.solver.constraints.feature_boxes.end()) {
        rfa.inner.constraints.feature_boxes[c] = found->second;
      }
    }
    rfa.time_budget_seconds = budget / 3.0;
    const std::vector<std::size_t> picked = RfaSelect(full.SelectFeatures(candidates), rfa);
    selected.clear();
    for (std::size_t p : picked) selected.push_back(candidates[p]);
    for (std::size_t j = 0; j < d; ++j) {
      if (forced_in[j] && std::find(selected.begin(), selected.end(), j) == selected.end()) {
        selected.push_back(j);
      }
    }
    std::sort(selected.begin(), selected.end());
    rfa_applied = true;
    Log(cfg, "RFA selected " + std::to_string(picked.size()) + "/" + std::to_string(d) + " features");
  }

  const BinaryDataset ds = full.SelectFeatures(selected);
  solver.constraints.force_include.clear();
  solver.constraints.force_exclude.clear();
  solver.constraints.feature_boxes.clear();
  for (std::size_t s = 0; s < selected.size(); ++s) {
    const std::size_t j = selected[s];
    if (forced_in[j]) solver.constraints.force_include.push_back(s);
    if (forced_out[j]) solver.constraints.force_exclude.push_back(s);
    auto found = cfg.solver.constraints.feature_boxes.find(j);
    if (found != cfg.solver.constraints.feature_boxes.end()) {
      solver.constraints.feature_boxes[s] = found->second;
    }
  }
  if (rfa_applied) {
    const double used = std::chrono::duration<double>(Clock::now() - start).count();
    solver.time_limit_seconds = std::max(budget * 2.0 / 3.0, budget - used);
  }
  solver.seed = cfg.seed;
  SolveResult result = SolveMiss(ds, solver);
  const MissModel bare = result.ToModel(ds, solver);
  MissModel model(bare.lambda(), bare.feature_names(), bare.class_names(), bare.meta(),
                  std::move(schema));
  return TrainOutcome{std::move(model), std::move(result), d, std::move(selected), rfa_applied};
}

CvReport CrossValidate(const RawTable& table, const PipelineConfig& cfg, std::size_t k) {
  if (!table.has_labels()) throw Error("cv: table has no labels");
  const std::vector<std::string> classes = table.DistinctLabels();
  std::vector<int> labels(table.num_rows());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    labels[i] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), table.labels[i]) -
                                 classes.begin());
  }
  const std::vector<Fold> folds = StratifiedFolds(labels, classes.size(), k, cfg.seed);

  CvReport report;
  std::vector<double> f1, auc, ece, gap;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    const RawTable train = table.Subset(folds[f].train);
    const RawTable test = table.Subset(folds[f].test);
    if (train.DistinctLabels() != classes) throw Error("cv: a training fold lost a class");
    PipelineConfig fold_cfg = cfg;
    fold_cfg.seed = cfg.seed + f;
    const TrainOutcome trained = TrainPipeline(train, fold_cfg);
    const MissModel& model = trained.model;
    const BinaryDataset binary_test = model.Encode(test);

    const std::size_t n = binary_test.num_samples();
    std::vector<int> y_pred(n);
    RealMatrix probs(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(classes.size()));
    for (std::size_t i = 0; i < n; ++i) {
      y_pred[i] = model.Predict(binary_test.row(i));
      const std::vector<double> p = model.PredictProba(binary_test.row(i));
      for (std::size_t c = 0; c < p.size(); ++c) {
        probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = p[c];
      }
    }
    FoldReport fr;
    fr.fold = f;
    fr.num_train = folds[f].train.size();
    fr.num_test = n;
    fr.f1 = WeightedF1(binary_test.labels(), y_pred, classes.size());
    fr.auc = WeightedOvrAuc(binary_test.labels(), probs, classes.size());
    fr.ece = ExpectedCalibrationError(binary_test.labels(), probs, classes.size());
    fr.optimality_gap = trained.result.gap;
    fr.objective = trained.result.v_max;
    fr.model_size = ModelSize(model.lambda());
    fr.status = std::string(ToString(trained.result.status));
    fr.test_indices = folds[f].test;
    char line[200];
    std::snprintf(line, sizeof(line), "fold %zu: f1=%.4f auc=%.4f ece=%.4f gap=%.4f size=%d status=%s",
                  f, fr.f1, fr.auc, fr.ece, fr.optimality_gap, fr.model_size, fr.status.c_str());
    Log(cfg, line);
    f1.push_back(fr.f1);
    auc.push_back(fr.auc);
    ece.push_back(fr.ece);
    gap.push_back(fr.optimality_gap);
    report.folds.push_back(std::move(fr));
  }
  report.f1 = Summarize(f1);
  report.auc = Summarize(auc);
  report.ece = Summarize(ece);
  report.optimality_gap = Summarize(gap);
  return report;
}

std::string CvReport::ToJson() const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  nlohmann::ordered_json fold_list = nlohmann::ordered_json::array();
  for (const auto& f : folds) {
    nlohmann::ordered_json j;
    j["fold"] = f.fold;
    j["n_train"] = f.num_train;
    j["n_test"] = f.num_test;
    j["f1"] = f.f1;
    j["auc"] = f.auc;
    j["ece"] = f.ece;
    j["optimality_gap"] = f.optimality_gap;
    j["objective"] = f.objective;
    j["model_size"] = f.model_size;
    j["status"] = f.status;
    j["test_indices"] = f.test_indices;
    fold_list.push_back(std::move(j));
  }
  doc["folds"] = std::move(fold_list);
  auto summary = [](const MetricSummary& s) {
    nlohmann::ordered_json j;
    j["mean"] = s.mean;
    j["std"] = s.std;
    return j;
  };
  doc["summary"]["f1"] = summary(f1);
  doc["summary"]["auc"] = summary(auc);
  doc["summary"]["ece"] = summary(ece);
  doc["summary"]["optimality_gap"] = summary(optimality_gap);
  return doc.dump(2) + "\n";
}

std::string CvReport::ToText() const {
  std::ostringstream out;
  char buf[200];
  std::snprintf(buf, sizeof(buf), "%-6s %8s %8s %8s %8s %6s  %s\n", "fold", "f1", "auc", "ece",
                "gap", "size", "status");
  out << buf;
  for (const auto& f : folds) {
    std::snprintf(buf, sizeof(buf), "%-6zu %8.4f %8.4f %8.4f %8.4f %6d  %s\n", f.fold, f.f1, f.auc,
                  f.ece, f.optimality_gap, f.model_size, f.status.c_str());
    out << buf;
  }
  auto cell = [](const MetricSummary& s) {
    char c[40];
    std::snprintf(c, sizeof(c), "%.3f+-%.3f", s.mean, s.std);
    return std::string(c);
  };
  std::snprintf(buf, sizeof(buf), "%-6s %s %s %s %s\n", "mean", cell(f1).c_str(), cell(auc).c_str(),
                cell(ece).c_str(), cell(optimality_gap).c_str());
  out << buf;
  return out.str();
}

}  // namespace miss
