#include "miss/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace miss {
namespace {

RealMatrix Rows(std::initializer_list<std::initializer_list<double>> rows) {
  RealMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index k = 0;
    for (double v : r) m(i, k++) = v;
    ++i;
  }
  return m;
}

// Pairwise Mann-Whitney count, support-weighted over classes.
double PairwiseAuc(const std::vector<int>& y, const RealMatrix& p, std::size_t num_classes) {
  double total = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    double wins = 0.0, pairs = 0.0, support = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
      if (y[a] != static_cast<int>(k)) continue;
      support += 1.0;
      for (std::size_t b = 0; b < y.size(); ++b) {
        if (y[b] == static_cast<int>(k)) continue;
        const double sa = p(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(k));
        const double sb = p(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k));
        wins += sa > sb ? 1.0 : (sa == sb ? 0.5 : 0.0);
        pairs += 1.0;
      }
    }
    if (support > 0.0) total += support / static_cast<double>(y.size()) * wins / pairs;
  }
  return total;
}

TEST(WeightedF1, PerfectAndAllWrong) {
  const std::vector<int> y{0, 1, 2, 1};
  EXPECT_EQ(WeightedF1(y, y, 3), 1.0);
  const std::vector<int> t{0, 0, 1, 1}, p{1, 1, 0, 0};
  EXPECT_EQ(WeightedF1(t, p, 2), 0.0);
}

TEST(WeightedF1, HandComputedConfusion) {
  // class 0: P=1, R=1/2 -> 2/3 (weight 1/2); class 1: P=1/2, R=1 -> 2/3 (1/4); class 2: 1 (1/4).
  const std::vector<int> t{0, 0, 1, 2}, p{0, 1, 1, 2};
  EXPECT_NEAR(WeightedF1(t, p, 3), 0.75, 1e-10);
}

TEST(WeightedF1, RejectsBadInput) {
  const std::vector<int> t{0, 3}, p{0, 1};
  EXPECT_THROW(WeightedF1(t, p, 2), Error);
  const std::vector<int> short_pred{0};
  EXPECT_THROW(WeightedF1(p, short_pred, 2), Error);
}

TEST(WeightedOvrAuc, PerfectRanking) {
  const std::vector<int> y{0, 1, 2};
  const RealMatrix p = Rows({{0.8, 0.1, 0.1}, {0.1, 0.8, 0.1}, {0.1, 0.1, 0.8}});
  EXPECT_EQ(WeightedOvrAuc(y, p, 3), 1.0);
}

TEST(WeightedOvrAuc, AllTiesGiveHalf) {
  const std::vector<int> y{0, 1, 2, 0};
  const RealMatrix p = RealMatrix::Constant(4, 3, 1.0 / 3.0);
  EXPECT_NEAR(WeightedOvrAuc(y, p, 3), 0.5, 1e-15);
}

TEST(WeightedOvrAuc, SixSampleFixture) {
  const std::vector<int> y{0, 1, 2, 0, 1, 2};
  const RealMatrix p = Rows({{0.5, 0.3, 0.2},
                             {0.4, 0.4, 0.2},
                             {0.2, 0.3, 0.5},
                             {0.3, 0.3, 0.4},
                             {0.2, 0.6, 0.2},
                             {0.3, 0.2, 0.5}});
  // Class 0 positives {0.5, 0.3} vs negatives {0.4, 0.2, 0.2, 0.3}: 4 + 2.5 = 6.5 of 8.
  // Class 1 positives {0.4, 0.6} vs {0.3, 0.3, 0.3, 0.2}: 8 of 8.
  // Class 2 positives {0.5, 0.5} vs {0.2, 0.2, 0.4, 0.2}: 8 of 8.
  const double hand = (6.5 / 8.0 + 1.0 + 1.0) / 3.0;
  EXPECT_NEAR(WeightedOvrAuc(y, p, 3), hand, 1e-10);
  EXPECT_NEAR(PairwiseAuc(y, p, 3), hand, 1e-10);
}

TEST(WeightedOvrAuc, MatchesPairwiseCountOnRandomInputs) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> label(0, 3), level(0, 6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> y(30);
    for (int& v : y) v = label(rng);
    y[0] = 0;
    y[1] = 1;
    RealMatrix p(30, 4);
    for (Eigen::Index i = 0; i < 30; ++i) {
      for (Eigen::Index k = 0; k < 4; ++k) p(i, k) = 1.0 + level(rng);  // coarse values force ties
      p.row(i) /= p.row(i).sum();
    }
    EXPECT_NEAR(WeightedOvrAuc(y, p, 4), PairwiseAuc(y, p, 4), 1e-10);
  }
}

TEST(WeightedOvrAuc, MonotoneTransformInvariance) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> y(40);
  RealMatrix p(40, 2), q(40, 2);
  for (Eigen::Index i = 0; i < 40; ++i) {
    y[static_cast<std::size_t>(i)] = u(rng) < 0.4 ? 1 : 0;
    const double v = u(rng);
    p(i, 1) = v;
    p(i, 0) = 1.0 - v;
    q(i, 1) = v * v * v;
    q(i, 0) = 1.0 - v * v * v;
  }
  y[0] = 0;
  y[1] = 1;
  EXPECT_NEAR(WeightedOvrAuc(y, p, 2), WeightedOvrAuc(y, q, 2), 1e-12);
}

TEST(WeightedOvrAuc, SingleClassIsUndefined) {
  const std::vector<int> y{1, 1};
  const RealMatrix p = Rows({{0.5, 0.5}, {0.2, 0.8}});
  try {
    WeightedOvrAuc(y, p, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("AUC undefined"), std::string::npos);
  }
}

TEST(WeightedOvrAuc, RowsMustSumToOne) {
  const std::vector<int> y{0, 1};
  EXPECT_THROW(WeightedOvrAuc(y, Rows({{0.5, 0.6}, {0.5, 0.5}}), 2), Error);
}

TEST(ExpectedCalibrationError, ConstantCalibratedPredictorIsExactlyZero) {
  // Frequencies 3/7, 1/7, 3/7 are not exact in binary floating point.
  const std::vector<int> y{0, 0, 0, 1, 2, 2, 2};
  RealMatrix p(7, 3);
  for (Eigen::Index i = 0; i < 7; ++i) p.row(i) << 3.0 / 7.0, 1.0 / 7.0, 3.0 / 7.0;
  EXPECT_EQ(ExpectedCalibrationError(y, p, 3), 0.0);
  EXPECT_EQ(ExpectedCalibrationError(y, p, 3, 3), 0.0);
}

TEST(ExpectedCalibrationError, ConfidentAndCorrectIsZero) {
  const std::vector<int> y{0, 1, 1, 2};
  const RealMatrix p = Rows({{1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}});
  EXPECT_EQ(ExpectedCalibrationError(y, p, 3), 0.0);
}

TEST(ExpectedCalibrationError, TenSampleFixture) {
  const std::vector<int> y{0, 0, 1, 0, 0, 1, 1, 0, 1, 1};
  const std::vector<double> p1{0.1, 0.2, 0.3, 0.4, 0.45, 0.6, 0.7, 0.8, 0.9, 0.95};
  RealMatrix p(10, 2);
  for (Eigen::Index i = 0; i < 10; ++i) p.row(i) << 1.0 - p1[static_cast<std::size_t>(i)], p1[static_cast<std::size_t>(i)];
  // Two bins of five: class 1 gives 0.5 |0.29 - 0.2| + 0.5 |0.79 - 0.8| = 0.05,
  // class 0 mirrors it.
  EXPECT_NEAR(ExpectedCalibrationError(y, p, 2, 2), 0.05, 1e-10);
  // One sample per bin: mean |p - y| = 3.5 / 10 for both classes.
  EXPECT_NEAR(ExpectedCalibrationError(y, p, 2, 10), 0.35, 1e-10);
}

TEST(ExpectedCalibrationError, TiedProbabilitiesShareABin) {
  // Class 1 column: six samples at 0.5 cross the first chunk boundary.
  const std::vector<int> y{1, 0, 1, 0, 1, 0, 1, 1};
  const std::vector<double> p1{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.9, 0.9};
  RealMatrix p(8, 2);
  for (Eigen::Index i = 0; i < 8; ++i) p.row(i) << 1.0 - p1[static_cast<std::size_t>(i)], p1[static_cast<std::size_t>(i)];
  // Class 1: both chunks open at 0.5, so all eight share a bin: |0.6 - 5/8|.
  // Class 0: bins {0.1 x2, freq 0} and {0.5 x6, freq 1/2}: 2/8 * 0.1 + 0.
  EXPECT_NEAR(ExpectedCalibrationError(y, p, 2, 2), 0.025, 1e-10);
}

TEST(Metrics, StayInUnitInterval) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::uniform_int_distribution<int> label(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int> y(25), pred(25);
    RealMatrix p(25, 3);
    for (std::size_t i = 0; i < 25; ++i) {
      y[i] = label(rng);
      pred[i] = label(rng);
      const auto r = static_cast<Eigen::Index>(i);
      p.row(r) << u(rng), u(rng), u(rng);
      p.row(r) /= p.row(r).sum();
    }
    y[0] = 0;
    y[1] = 1;
    for (double v : {WeightedF1(y, pred, 3), WeightedOvrAuc(y, p, 3), ExpectedCalibrationError(y, p, 3)}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace miss
