#include "miss/loss.hpp"

#include <algorithm>
#include <cmath>

namespace miss {
namespace {

void CheckShape(const RealMatrix& lambda, const BinaryDataset& ds) {
  if (static_cast<std::size_t>(lambda.rows()) != ds.num_features() + 1 ||
      static_cast<std::size_t>(lambda.cols()) != ds.num_classes()) {
    throw Error("loss: coefficient matrix shape does not match dataset");
  }
  if (!lambda.allFinite()) throw Error("loss: non-finite coefficients");
  if (ds.num_samples() == 0) throw Error("loss: empty dataset");
}

// Scores of sample i into `out` (length K).
void ComputeScores(const RealMatrix& lambda, const BinaryDataset& ds, std::size_t i,
                   double* out) {
  const auto k_count = static_cast<Eigen::Index>(ds.num_classes());
  for (Eigen::Index k = 0; k < k_count; ++k) out[k] = lambda(0, k);
  auto x = ds.row(i);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (!x[j]) continue;
    const auto row = static_cast<Eigen::Index>(j + 1);
    for (Eigen::Index k = 0; k < k_count; ++k) out[k] += lambda(row, k);
  }
}

double LogSumExp(const double* s, std::size_t k_count) {
  double m = s[0];
  for (std::size_t k = 1; k < k_count; ++k) m = std::max(m, s[k]);
  double sum = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) sum += std::exp(s[k] - m);
  return m + std::log(sum);
}

}  // namespace

double LossValueAndGradient(const RealMatrix& lambda, const BinaryDataset& ds,
                            RealMatrix* gradient) {
  CheckShape(lambda, ds);
  const std::size_t n = ds.num_samples();
  const std::size_t k_count = ds.num_classes();
  if (gradient != nullptr) gradient->setZero(lambda.rows(), lambda.cols());

  std::vector<double> s(k_count);
  std::vector<double> diff(k_count);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ComputeScores(lambda, ds, i, s.data());
    const double lse = LogSumExp(s.data(), k_count);
    const int y = ds.label(i);
    total += lse - s[static_cast<std::size_t>(y)];
    if (gradient == nullptr) continue;
    for (std::size_t k = 0; k < k_count; ++k) {
      diff[k] = std::exp(s[k] - lse) - (static_cast<int>(k) == y ? 1.0 : 0.0);
    }
    auto& g = *gradient;
    for (std::size_t k = 0; k < k_count; ++k) g(0, static_cast<Eigen::Index>(k)) += diff[k];
    auto x = ds.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!x[j]) continue;
      for (std::size_t k = 0; k < k_count; ++k) {
        g(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(k)) += diff[k];
      }
    }
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  if (gradient != nullptr) *gradient *= inv_n;
  return total * inv_n;
}

double LossValue(const RealMatrix& lambda, const BinaryDataset& ds) {
  return LossValueAndGradient(lambda, ds, nullptr);
}

RealMatrix LossGradient(const RealMatrix& lambda, const BinaryDataset& ds) {
  RealMatrix gradient;
  LossValueAndGradient(lambda, ds, &gradient);
  return gradient;
}

double Cut::Evaluate(const RealMatrix& lambda) const {
  return value_at_anchor + (gradient.array() * (lambda - anchor).array()).sum();
}

double Cut::Offset() const {
  return value_at_anchor - (gradient.array() * anchor.array()).sum();
}

Cut MakeCut(const RealMatrix& lambda, const BinaryDataset& ds) {
  Cut cut;
  cut.anchor = lambda;
  cut.value_at_anchor = LossValueAndGradient(lambda, ds, &cut.gradient);
  if (!cut.gradient.allFinite() || !std::isfinite(cut.value_at_anchor)) {
    throw Error("loss: non-finite cut");
  }
  return cut;
}

IncrementalObjective::IncrementalObjective(const BinaryDataset& ds, double c0)
    : ds_(ds),
      c0_(c0),
      num_samples_(ds.num_samples()),
      num_classes_(ds.num_classes()),
      rows_by_feature_(ds.num_features() + 1),
      scratch_(ds.num_classes()) {
  if (num_samples_ == 0) throw Error("loss: empty dataset");
  auto& all = rows_by_feature_[0];
  all.resize(num_samples_);
  for (std::size_t i = 0; i < num_samples_; ++i) {
    all[i] = i;
    auto x = ds.row(i);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j]) rows_by_feature_[j + 1].push_back(i);
    }
  }
}

void IncrementalObjective::Reset(const RealMatrix& lambda) {
  CheckShape(lambda, ds_);
  lambda_ = lambda;
  scores_.assign(num_samples_ * num_classes_, 0.0);
  sample_loss_.assign(num_samples_, 0.0);
  for (std::size_t i = 0; i < num_samples_; ++i) {
    double* s = scores_.data() + i * num_classes_;
    ComputeScores(lambda_, ds_, i, s);
    sample_loss_[i] = SampleLoss(s, ds_.label(i));
  }
  row_nonzeros_.assign(static_cast<std::size_t>(lambda_.rows()), 0);
  model_size_ = 0;
  for (Eigen::Index j = 1; j < lambda_.rows(); ++j) {
    for (Eigen::Index k = 0; k < lambda_.cols(); ++k) {
      if (lambda_(j, k) != 0.0) ++row_nonzeros_[static_cast<std::size_t>(j)];
    }
    if (row_nonzeros_[static_cast<std::size_t>(j)] > 0) ++model_size_;
  }
  RecomputeLossSum();
}

double IncrementalObjective::SampleLoss(const double* scores, int label) const {
  return LogSumExp(scores, num_classes_) - scores[label];
}

const std::vector<std::size_t>& IncrementalObjective::AffectedRows(std::size_t j) const {
  return rows_by_feature_[j];
}

void IncrementalObjective::RecomputeLossSum() {
  double total = 0.0;
  for (double v : sample_loss_) total += v;
  loss_sum_ = total;
}

int IncrementalObjective::ModelSizeIfSet(std::size_t j, std::size_t k, double v) const {
  if (j == 0) return model_size_;
  const double old = lambda_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  int nonzeros = row_nonzeros_[j] + (v != 0.0 ? 1 : 0) - (old != 0.0 ? 1 : 0);
  return model_size_ + (nonzeros > 0 ? 1 : 0) - (row_nonzeros_[j] > 0 ? 1 : 0);
}

double IncrementalObjective::DeltaIfSet(std::size_t j, std::size_t k, double v) const {
  const double old = lambda_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  const double step = v - old;
  double delta_sum = 0.0;
  if (step != 0.0) {
    for (std::size_t i : AffectedRows(j)) {
      const double* s = scores_.data() + i * num_classes_;
      std::copy(s, s + num_classes_, scratch_.begin());
      scratch_[k] += step;
      delta_sum += SampleLoss(scratch_.data(), ds_.label(i)) - sample_loss_[i];
    }
  }
  return delta_sum / static_cast<double>(num_samples_) +
         c0_ * (ModelSizeIfSet(j, k, v) - model_size_);
}

double IncrementalObjective::ValueIfSet(std::size_t j, std::size_t k, double v) const {
  return value() + DeltaIfSet(j, k, v);
}

void IncrementalObjective::Set(std::size_t j, std::size_t k, double v) {
  auto& entry = lambda_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  const double step = v - entry;
  if (step == 0.0) return;
  model_size_ = ModelSizeIfSet(j, k, v);
  if (j > 0) row_nonzeros_[j] += (v != 0.0 ? 1 : 0) - (entry != 0.0 ? 1 : 0);
  entry = v;
  for (std::size_t i : AffectedRows(j)) {
    double* s = scores_.data() + i * num_classes_;
    s[k] += step;
    sample_loss_[i] = SampleLoss(s, ds_.label(i));
  }
  RecomputeLossSum();
}

}  // namespace miss
