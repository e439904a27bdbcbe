#include "miss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace miss {
namespace {

void CheckLabels(std::span<const int> y, std::size_t num_classes, const char* what) {
  for (int v : y) {
    if (v < 0 || static_cast<std::size_t>(v) >= num_classes) {
      throw Error(std::string(what) + ": label out of range");
    }
  }
}

void CheckProbs(std::span<const int> y_true, const RealMatrix& probs, std::size_t num_classes,
                const char* what) {
  if (y_true.empty()) throw Error(std::string(what) + ": empty input");
  if (static_cast<std::size_t>(probs.rows()) != y_true.size() ||
      static_cast<std::size_t>(probs.cols()) != num_classes) {
    throw Error(std::string(what) + ": probability matrix shape mismatch");
  }
  CheckLabels(y_true, num_classes, what);
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    if (!probs.row(i).allFinite() || std::abs(probs.row(i).sum() - 1.0) > 1e-6) {
      throw Error(std::string(what) + ": probability rows must sum to 1");
    }
  }
}

std::vector<double> Support(std::span<const int> y, std::size_t num_classes) {
  std::vector<double> support(num_classes, 0.0);
  for (int v : y) support[static_cast<std::size_t>(v)] += 1.0;
  return support;
}

}  // namespace

double WeightedF1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t num_classes) {
  if (y_true.size() != y_pred.size()) throw Error("f1: length mismatch");
  if (y_true.empty()) throw Error("f1: empty input");
  CheckLabels(y_true, num_classes, "f1");
  CheckLabels(y_pred, num_classes, "f1");
  std::vector<double> tp(num_classes, 0.0), fp(num_classes, 0.0), fn(num_classes, 0.0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const auto t = static_cast<std::size_t>(y_true[i]);
    const auto p = static_cast<std::size_t>(y_pred[i]);
    if (t == p) {
      tp[t] += 1.0;
    } else {
      fp[p] += 1.0;
      fn[t] += 1.0;
    }
  }
  const std::vector<double> support = Support(y_true, num_classes);
  const double n = static_cast<double>(y_true.size());
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    const double denom = 2.0 * tp[k] + fp[k] + fn[k];
    const double f1 = denom > 0.0 ? 2.0 * tp[k] / denom : 0.0;
    total += f1 * support[k] / n;
  }
  return total;
}

double WeightedOvrAuc(std::span<const int> y_true, const RealMatrix& probs, std::size_t num_classes) {
  CheckProbs(y_true, probs, num_classes, "auc");
  const std::vector<double> support = Support(y_true, num_classes);
  const double n = static_cast<double>(y_true.size());
  if (std::count_if(support.begin(), support.end(), [](double s) { return s > 0.0; }) < 2) {
    throw Error("auc: AUC undefined for a single class");
  }
  std::vector<std::size_t> order(y_true.size());
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (support[k] == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return probs(static_cast<Eigen::Index>(a), col) < probs(static_cast<Eigen::Index>(b), col);
    });
    // Midranks (1-based) summed over positives.
    double rank_sum = 0.0;
    for (std::size_t start = 0; start < order.size();) {
      std::size_t end = start;
      const double v = probs(static_cast<Eigen::Index>(order[start]), col);
      while (end < order.size() && probs(static_cast<Eigen::Index>(order[end]), col) == v) ++end;
      const double midrank = 0.5 * (static_cast<double>(start + 1) + static_cast<double>(end));
      for (std::size_t t = start; t < end; ++t) {
        if (y_true[order[t]] == static_cast<int>(k)) rank_sum += midrank;
      }
      start = end;
    }
    const double pos = support[k];
    const double neg = n - pos;
    const double auc = (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
    total += auc * pos / n;
  }
  return total;
}

double ExpectedCalibrationError(std::span<const int> y_true, const RealMatrix& probs,
                                std::size_t num_classes, std::size_t n_bins) {
  CheckProbs(y_true, probs, num_classes, "ece");
  if (n_bins == 0) throw Error("ece: need at least one bin");
  const std::vector<double> support = Support(y_true, num_classes);
  const std::size_t n = y_true.size();
  const std::size_t bins = std::min(n_bins, n);
  std::vector<std::size_t> order(n);
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    if (support[k] == 0.0) continue;
    const auto col = static_cast<Eigen::Index>(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return probs(static_cast<Eigen::Index>(a), col) < probs(static_cast<Eigen::Index>(b), col);
    });
    // Bin edges are the values opening each equal-size chunk, so tied
    // probabilities always share a bin.
    std::vector<double> edges;
    std::size_t start = 0;
    for (std::size_t b = 0; b < bins; ++b) {
      if (b > 0) {
        const double edge = probs(static_cast<Eigen::Index>(order[start]), col);
        if (edges.empty() || edge > edges.back()) edges.push_back(edge);
      }
      start += n / bins + (b < n % bins ? 1 : 0);
    }
    std::vector<double> lowest(edges.size() + 1, 0.0);
    std::vector<double> offset_sum(edges.size() + 1, 0.0);
    std::vector<double> hits(edges.size() + 1, 0.0);
    std::vector<double> count(edges.size() + 1, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double p = probs(static_cast<Eigen::Index>(order[t]), col);
      const auto bin = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), p) -
                                                edges.begin());
      // Sorted order: the first sample of a bin holds its minimum.
      if (count[bin] == 0.0) lowest[bin] = p;
      offset_sum[bin] += p - lowest[bin];
      hits[bin] += y_true[order[t]] == static_cast<int>(k) ? 1.0 : 0.0;
      count[bin] += 1.0;
    }
    double class_error = 0.0;
    for (std::size_t b = 0; b < count.size(); ++b) {
      if (count[b] == 0.0) continue;
      // Mean as minimum plus mean offset: exact for a constant bin.
      const double mean = lowest[b] + offset_sum[b] / count[b];
      class_error += std::abs(mean - hits[b] / count[b]) * count[b] / static_cast<double>(n);
    }
    total += class_error * support[k] / static_cast<double>(n);
  }
  return total;
}

}  // namespace miss
