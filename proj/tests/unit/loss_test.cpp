#include "miss/loss.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "miss/common.hpp"
#include "miss/model.hpp"
#include "oracles.hpp"

namespace miss {
namespace {

using testing::FiniteDifferenceGradient;
using testing::NaiveLoss;
using testing::RandomDataset;

RealMatrix RandomLambda(std::size_t d, std::size_t k, std::mt19937_64& rng, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  RealMatrix m(d + 1, k);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

TEST(LossValue, ZeroIsLogK) {
  for (std::size_t k = 2; k <= 5; ++k) {
    const BinaryDataset ds = RandomDataset(17, 3, k, k);
    EXPECT_NEAR(LossValue(RealMatrix::Zero(4, static_cast<Eigen::Index>(k)), ds),
                std::log(static_cast<double>(k)), 1e-12);
  }
}

TEST(LossValue, BinaryReducesToLogistic) {
  const BinaryDataset ds(1, 1, {1}, {0}, {"f"}, {"a", "b"});
  RealMatrix lambda(2, 2);
  lambda << 0.3, -0.2, 1.1, 0.4;
  const double t = (0.3 + 1.1) - (-0.2 + 0.4);
  EXPECT_NEAR(LossValue(lambda, ds), std::log1p(std::exp(-t)), 1e-15);
}

TEST(LossValue, MatchesNaiveEvaluation) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryDataset ds = RandomDataset(6, 3, 2, seed);
    const RealMatrix lambda = RandomLambda(3, 2, rng);
    EXPECT_NEAR(LossValue(lambda, ds), NaiveLoss(lambda, ds), 1e-10);
  }
}

TEST(LossValue, LargeScoresStayFinite) {
  const BinaryDataset ds = RandomDataset(10, 2, 3, 2);
  RealMatrix lambda = RealMatrix::Constant(3, 3, 400.0);
  lambda(0, 1) = -400.0;
  EXPECT_TRUE(std::isfinite(LossValue(lambda, ds)));
}

TEST(LossValue, RejectsBadInput) {
  const BinaryDataset ds = RandomDataset(5, 2, 2, 3);
  EXPECT_THROW(LossValue(RealMatrix::Zero(2, 2), ds), Error);
  RealMatrix bad = RealMatrix::Zero(3, 2);
  bad(1, 1) = std::nan("");
  EXPECT_THROW(LossValue(bad, ds), Error);
}

TEST(LossValue, BiasShiftInvariance) {
  std::mt19937_64 rng(5);
  const BinaryDataset ds = RandomDataset(25, 4, 3, 8);
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix lambda = RandomLambda(4, 3, rng);
    const double before = LossValue(lambda, ds);
    lambda.row(0).array() += 1.7 * trial - 10.0;
    EXPECT_NEAR(LossValue(lambda, ds), before, 1e-10);
  }
}

TEST(LossGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t d = 1 + seed % 5;
    const std::size_t k = 2 + seed % 3;
    const BinaryDataset ds = RandomDataset(10 + seed, d, k, seed);
    const RealMatrix lambda = RandomLambda(d, k, rng);
    const RealMatrix g = LossGradient(lambda, ds);
    const RealMatrix fd = FiniteDifferenceGradient(lambda, ds, 1e-4);
    EXPECT_LE((g - fd).norm(), 1e-5 * std::max(1.0, fd.norm())) << "seed " << seed;
  }
}

TEST(LossGradient, BiasRowSumsToZero) {
  std::mt19937_64 rng(3);
  const BinaryDataset ds = RandomDataset(30, 3, 4, 4);
  const RealMatrix g = LossGradient(RandomLambda(3, 4, rng), ds);
  EXPECT_NEAR(g.row(0).sum(), 0.0, 1e-15);
}

TEST(LossGradient, BalancedZeroHasZeroBiasGradient) {
  const BinaryDataset ds(4, 1, {1, 0, 1, 0}, {0, 0, 1, 1}, {"f"}, {"a", "b"});
  const RealMatrix g = LossGradient(RealMatrix::Zero(2, 2), ds);
  EXPECT_NEAR(g(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(g(0, 1), 0.0, 1e-15);
}

TEST(LossValueAndGradient, AgreesWithSeparateCalls) {
  std::mt19937_64 rng(6);
  const BinaryDataset ds = RandomDataset(40, 5, 3, 6);
  const RealMatrix lambda = RandomLambda(5, 3, rng);
  RealMatrix g;
  EXPECT_EQ(LossValueAndGradient(lambda, ds, &g), LossValue(lambda, ds));
  EXPECT_EQ(g, LossGradient(lambda, ds));
}

TEST(Cut, TangentAtAnchor) {
  std::mt19937_64 rng(7);
  const BinaryDataset ds = RandomDataset(20, 3, 3, 7);
  const RealMatrix anchor = RandomLambda(3, 3, rng);
  const Cut cut = MakeCut(anchor, ds);
  EXPECT_EQ(cut.Evaluate(anchor), cut.value_at_anchor);
  EXPECT_EQ(cut.value_at_anchor, LossValue(anchor, ds));
  EXPECT_NEAR(MakeCut(RealMatrix::Zero(4, 3), ds).value_at_anchor, std::log(3.0), 1e-12);
}

TEST(Cut, UnderEstimatesEverywhere) {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BinaryDataset ds = RandomDataset(30, 3, 3, seed);
    const Cut cut = MakeCut(RandomLambda(3, 3, rng), ds);
    for (int probe = 0; probe < 1000; ++probe) {
      const RealMatrix p = RandomLambda(3, 3, rng, 6.0);
      EXPECT_LE(cut.Evaluate(p), LossValue(p, ds) + 1e-9);
    }
  }
}

TEST(Cut, OffsetFormMatchesEvaluate) {
  std::mt19937_64 rng(9);
  const BinaryDataset ds = RandomDataset(15, 2, 2, 9);
  const Cut cut = MakeCut(RandomLambda(2, 2, rng), ds);
  const RealMatrix p = RandomLambda(2, 2, rng);
  EXPECT_NEAR(cut.Offset() + (cut.gradient.array() * p.array()).sum(), cut.Evaluate(p), 1e-12);
}

TEST(IncrementalObjective, TracksFullEvaluation) {
  std::mt19937_64 rng(10);
  const BinaryDataset ds = RandomDataset(35, 4, 3, 10);
  const double c0 = 0.01;
  IncrementalObjective inc(ds, c0);
  RealMatrix lambda = RealMatrix::Zero(5, 3);
  inc.Reset(lambda);
  std::uniform_int_distribution<int> row(0, 4), col(0, 2), val(-3, 3);
  for (int step = 0; step < 200; ++step) {
    const auto j = static_cast<std::size_t>(row(rng));
    const auto k = static_cast<std::size_t>(col(rng));
    const double v = val(rng);
    RealMatrix next = lambda;
    next(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
    const double expected = LossValue(next, ds) + c0 * ModelSize(next);
    EXPECT_NEAR(inc.ValueIfSet(j, k, v), expected, 1e-10);
    inc.Set(j, k, v);
    lambda = next;
    EXPECT_NEAR(inc.value(), expected, 1e-10);
  }
}

}  // namespace
}  // namespace miss
