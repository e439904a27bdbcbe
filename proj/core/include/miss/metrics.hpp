#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "miss/common.hpp"

namespace miss {

// Multiclass metrics computed one-vs-rest and averaged with weights equal to
// each class's share of y_true. All results lie in [0, 1].

/// Support-weighted F1. A class with no true and no predicted samples scores 0.
double WeightedF1(std::span<const int> y_true, std::span<const int> y_pred, std::size_t num_classes);

/// Support-weighted Mann-Whitney AUC of probs(:,k) for class k, a tied
/// positive/negative pair counting 1/2. Classes absent from y_true get weight
/// 0. Throws when y_true holds a single class.
double WeightedOvrAuc(std::span<const int> y_true, const RealMatrix& probs, std::size_t num_classes);

/// Support-weighted binned calibration error. For each class, samples are
/// sorted by probs(:,k) and cut into `n_bins` chunks of near-equal size (the
/// first n mod n_bins chunks get one extra sample); the value opening each
/// chunk becomes a bin edge, so equal probabilities share a bin. Each bin
/// contributes |mean prob - frequency of k| times its share of samples.
double ExpectedCalibrationError(std::span<const int> y_true, const RealMatrix& probs,
                                std::size_t num_classes, std::size_t n_bins = 10);

}  // namespace miss
