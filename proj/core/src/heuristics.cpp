#include "miss/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "miss/loss.hpp"

namespace miss {
namespace {

constexpr double kImprovement = 1e-9;

using Idx = Eigen::Index;

IntMatrix ToInt(const RealMatrix& m) {
  IntMatrix out(m.rows(), m.cols());
  for (Idx j = 0; j < m.rows(); ++j) {
    for (Idx k = 0; k < m.cols(); ++k) out(j, k) = static_cast<int>(std::lround(m(j, k)));
  }
  return out;
}

void CheckShape(const BinaryDataset& ds, const SearchSpace& space) {
  if (ds.num_features() != space.num_features() || ds.num_classes() != space.num_classes()) {
    throw Error("heuristics: search space does not match dataset");
  }
}

// Sets row j to zero and returns the objective, then restores it.
double ValueWithRowZeroed(IncrementalObjective& obj, std::size_t j, std::size_t num_classes) {
  std::vector<double> saved(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    saved[k] = obj.lambda()(static_cast<Idx>(j), static_cast<Idx>(k));
    obj.Set(j, k, 0.0);
  }
  const double value = obj.value();
  for (std::size_t k = 0; k < num_classes; ++k) obj.Set(j, k, saved[k]);
  return value;
}

// Best single nonzero entry of row j: (value, k, v).
std::tuple<double, std::size_t, int> BestActivation(const IncrementalObjective& obj,
                                                    const SearchSpace& space, std::size_t j) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  int best_v = 0;
  for (std::size_t k = 0; k < space.num_classes(); ++k) {
    const IntBox& b = space.box(j, k);
    for (int v = b.lo; v <= b.hi; ++v) {
      if (v == 0) continue;
      const double value = obj.ValueIfSet(j, k, v);
      if (value < best) {
        best = value;
        best_k = k;
        best_v = v;
      }
    }
  }
  return {best, best_k, best_v};
}

// Activates rows until force-includes and r_min hold.
void ActivateRequiredRows(IncrementalObjective& obj, const SearchSpace& space) {
  const std::size_t d = space.num_features();
  for (std::size_t j = 1; j <= d; ++j) {
    if (!space.forced_in(j) || obj.RowActive(j)) continue;
    auto [value, k, v] = BestActivation(obj, space, j);
    obj.Set(j, k, v);
  }
  while (obj.model_size() < space.r_min()) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    std::size_t best_k = 0;
    int best_v = 0;
    for (std::size_t j = 1; j <= d; ++j) {
      if (obj.RowActive(j) || !space.RowCanBeNonzero(j)) continue;
      auto [value, k, v] = BestActivation(obj, space, j);
      if (value < best) {
        best = value;
        best_j = j;
        best_k = k;
        best_v = v;
      }
    }
    if (best_j == 0) throw InfeasibleError("heuristics: cannot reach the minimum model size");
    obj.Set(best_j, best_k, best_v);
  }
}

bool MoveAllowed(const IncrementalObjective& obj, const SearchSpace& space, std::size_t j,
                 std::size_t k, int v) {
  if (j == 0) return true;
  const int current = obj.model_size();
  const int after = obj.ModelSizeIfSet(j, k, v);
  if (after > space.r_max() && after > current) return false;
  if (after < space.r_min() && after < current) return false;
  if (space.forced_in(j) && after < current) return false;
  return true;
}

}  // namespace

IntMatrix SequentialRounding(const RealMatrix& lambda, const BinaryDataset& ds,
                             const SearchSpace& space, double c0) {
  CheckShape(ds, space);
  const std::size_t rows = space.num_features() + 1;
  const std::size_t cols = space.num_classes();
  if (static_cast<std::size_t>(lambda.rows()) != rows ||
      static_cast<std::size_t>(lambda.cols()) != cols) {
    throw Error("heuristics: coefficient matrix shape does not match dataset");
  }
  RealMatrix x = lambda;
  struct Pending {
    double distance;  // |frac - 0.5|
    std::size_t index;
  };
  std::vector<Pending> pending;
  for (std::size_t j = 0; j < rows; ++j) {
    for (std::size_t k = 0; k < cols; ++k) {
      const IntBox& b = space.box(j, k);
      double& v = x(static_cast<Idx>(j), static_cast<Idx>(k));
      v = std::clamp(v, static_cast<double>(b.lo), static_cast<double>(b.hi));
      const double nearest = std::round(v);
      if (std::abs(v - nearest) <= 1e-9) {
        v = nearest;
        continue;
      }
      pending.push_back({std::abs(v - std::floor(v) - 0.5), space.Index(j, k)});
    }
  }
  std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.index < b.index;
  });

  IncrementalObjective obj(ds, c0);
  obj.Reset(x);
  for (const Pending& p : pending) {
    const std::size_t j = p.index / cols;
    const std::size_t k = p.index % cols;
    const IntBox& b = space.box(j, k);
    const double v = obj.lambda()(static_cast<Idx>(j), static_cast<Idx>(k));
    const double lo = std::clamp(std::floor(v), static_cast<double>(b.lo), static_cast<double>(b.hi));
    const double hi = std::clamp(std::ceil(v), static_cast<double>(b.lo), static_cast<double>(b.hi));
    const double choice = obj.ValueIfSet(j, k, hi) < obj.ValueIfSet(j, k, lo) ? hi : lo;
    obj.Set(j, k, choice);
  }

  while (obj.model_size() > space.r_max()) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (std::size_t j = 1; j < rows; ++j) {
      if (!obj.RowActive(j) || space.forced_in(j)) continue;
      const double value = ValueWithRowZeroed(obj, j, cols);
      if (value < best) {
        best = value;
        best_j = j;
      }
    }
    if (best_j == 0) throw InfeasibleError("heuristics: forced rows exceed the maximum model size");
    for (std::size_t k = 0; k < cols; ++k) obj.Set(best_j, k, 0.0);
  }
  ActivateRequiredRows(obj, space);
  return ToInt(obj.lambda());
}

IntMatrix PolishOneOpt(const IntMatrix& lambda, const BinaryDataset& ds, const SearchSpace& space,
                       double c0, int max_passes, PolishStats* stats) {
  CheckShape(ds, space);
  const std::size_t rows = space.num_features() + 1;
  const std::size_t cols = space.num_classes();
  IncrementalObjective obj(ds, c0);
  obj.Reset(lambda.cast<double>());
  PolishStats local;
  for (int pass = 0; pass < max_passes; ++pass) {
    ++local.passes;
    bool moved = false;
    for (std::size_t j = 0; j < rows; ++j) {
      for (std::size_t k = 0; k < cols; ++k) {
        const IntBox& b = space.box(j, k);
        const int current = static_cast<int>(obj.lambda()(static_cast<Idx>(j), static_cast<Idx>(k)));
        const double current_value = obj.value();
        double best = std::numeric_limits<double>::infinity();
        int best_v = current;
        for (int v = b.lo; v <= b.hi; ++v) {
          if (v == current || !MoveAllowed(obj, space, j, k, v)) continue;
          const double value = obj.ValueIfSet(j, k, v);
          if (value < best) {
            best = value;
            best_v = v;
          }
        }
        if (best < current_value - kImprovement) {
          obj.Set(j, k, best_v);
          ++local.moves;
          moved = true;
        }
      }
    }
    if (!moved) break;
  }
  if (stats != nullptr) *stats = local;
  return ToInt(obj.lambda());
}

IntMatrix FeasibleSeed(const BinaryDataset& ds, const SearchSpace& space, double c0) {
  CheckShape(ds, space);
  RealMatrix x = RealMatrix::Zero(static_cast<Idx>(space.num_features() + 1),
                                  static_cast<Idx>(space.num_classes()));
  for (std::size_t k = 0; k < space.num_classes(); ++k) {
    const IntBox& b = space.box(0, k);
    x(0, static_cast<Idx>(k)) = std::clamp(0, b.lo, b.hi);
  }
  IncrementalObjective obj(ds, c0);
  obj.Reset(x);
  ActivateRequiredRows(obj, space);
  return ToInt(obj.lambda());
}

}  // namespace miss
