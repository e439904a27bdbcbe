#include "miss/rfa.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "miss/loss.hpp"

namespace miss {
namespace {

// Feature (index into `working`) whose best nonzero single entry, added to
// `base`, gives the lowest objective. Ties go to the lowest index.
std::size_t BestActivation(const BinaryDataset& sub, const IntMatrix& base, const SolverConfig& inner) {
  IncrementalObjective obj(sub, inner.c0);
  obj.Reset(base.cast<double>());
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_j = 0;
  for (std::size_t j = 1; j <= sub.num_features(); ++j) {
    IntBox box{inner.constraints.lambda_min, inner.constraints.lambda_max};
    if (auto it = inner.constraints.feature_boxes.find(j - 1); it != inner.constraints.feature_boxes.end()) {
      box = it->second;
    }
    for (std::size_t k = 0; k < sub.num_classes(); ++k) {
      for (int v = box.lo; v <= box.hi; ++v) {
        if (v == 0) continue;
        const double value = obj.ValueIfSet(j, k, v);
        if (value < best) {
          best = value;
          best_j = j - 1;
        }
      }
    }
  }
  return best_j;
}

}  // namespace

std::vector<std::size_t> RfaSelect(const BinaryDataset& ds, const RfaConfig& cfg) {
  const std::size_t d = ds.num_features();
  std::vector<std::size_t> working(d);
  std::iota(working.begin(), working.end(), std::size_t{0});
  if (d <= cfg.f) return working;

  std::vector<std::size_t> pool;
  pool.reserve(cfg.f);
  for (std::size_t it = 0; it < cfg.f; ++it) {
    const BinaryDataset sub = ds.SelectFeatures(working);
    SolverConfig inner = cfg.inner;
    inner.progress = nullptr;
    inner.constraints.r_min = 0;
    inner.constraints.r_max = 1;
    inner.constraints.force_include.clear();
    inner.constraints.force_exclude.clear();
    inner.constraints.feature_boxes.clear();
    for (std::size_t w = 0; w < working.size(); ++w) {
      auto found = cfg.inner.constraints.feature_boxes.find(working[w]);
      if (found != cfg.inner.constraints.feature_boxes.end()) {
        inner.constraints.feature_boxes[w] = found->second;
      }
    }
    inner.time_limit_seconds = cfg.time_budget_seconds / static_cast<double>(cfg.f);
    const SolveResult result = SolveMiss(sub, inner);

    std::size_t chosen = working.size();
    for (std::size_t j = 1; j <= sub.num_features(); ++j) {
      if (result.lambda.row(static_cast<Eigen::Index>(j)).any()) {
        chosen = j - 1;
        break;
      }
    }
    const bool fallback = chosen == working.size();
    if (fallback) chosen = BestActivation(sub, result.lambda, inner);
    pool.push_back(working[chosen]);
    if (cfg.on_select) cfg.on_select(it, working[chosen], fallback);
    working.erase(working.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return pool;
}

}  // namespace miss
