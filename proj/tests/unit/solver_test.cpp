#include "miss/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "miss/loss.hpp"
#include "oracles.hpp"

namespace miss {
namespace {

using testing::BruteForceOptimum;
using testing::FullEnumeration;
using testing::NaiveObjective;
using testing::RandomDataset;

SolverConfig SmallConfig(double c0 = 1e-4) {
  SolverConfig cfg;
  cfg.c0 = c0;
  cfg.constraints.lambda_min = -2;
  cfg.constraints.lambda_max = 2;
  cfg.constraints.bias_min = -3;
  cfg.constraints.bias_max = 3;
  cfg.constraints.r_max = 5;
  cfg.time_limit_seconds = 60.0;
  return cfg;
}

// Eight samples where feature 0 equals the label and feature 1 is noise.
BinaryDataset SeparableToy() {
  std::vector<std::uint8_t> x = {0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1};
  std::vector<int> y = {0, 0, 0, 0, 1, 1, 1, 1};
  return BinaryDataset(8, 2, x, y, {"a", "b"}, {"no", "yes"});
}

TEST(LatticeOracle, ShiftEnumerationMatchesFullEnumeration) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const BinaryDataset ds = RandomDataset(12, 2, 2, seed);
    const auto fast = BruteForceOptimum(ds, -1, 1, -2, 2, 1e-3, 2);
    const auto full = FullEnumeration(ds, -1, 1, -2, 2, 1e-3, 2);
    EXPECT_NEAR(fast.value, full.value, 1e-12) << "seed " << seed;
  }
  const BinaryDataset ds3 = RandomDataset(10, 1, 3, 9);
  EXPECT_NEAR(BruteForceOptimum(ds3, -1, 1, -1, 1, 1e-3, 1).value,
              FullEnumeration(ds3, -1, 1, -1, 1, 1e-3, 1).value, 1e-12);
}

TEST(SolveMiss, SeparableToyIsOptimalAndMatchesEnumeration) {
  const BinaryDataset ds = SeparableToy();
  SolverConfig cfg = SmallConfig();
  cfg.constraints.lambda_min = -1;
  cfg.constraints.lambda_max = 1;
  const SolveResult r = SolveMiss(ds, cfg);
  const auto oracle = FullEnumeration(ds, -1, 1, -3, 3, cfg.c0, 2);
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_EQ(r.gap, 0.0);
  EXPECT_NEAR(r.v_max, oracle.value, 1e-6);
  EXPECT_NEAR(NaiveObjective(r.lambda, ds, cfg.c0), r.v_max, 1e-9);
}

TEST(SolveMiss, MatchesBruteForceOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t d = 1 + seed % 3;
    const std::size_t k = 2 + seed % 2;
    const BinaryDataset ds = RandomDataset(30, d, k, 100 + seed);
    const SolverConfig cfg = SmallConfig();
    const SolveResult r = SolveMiss(ds, cfg);
    const auto oracle = BruteForceOptimum(ds, -2, 2, -3, 3, cfg.c0, static_cast<int>(d));
    EXPECT_EQ(r.status, SolveStatus::kOptimal) << "seed " << seed;
    EXPECT_EQ(r.gap, 0.0) << "seed " << seed;
    EXPECT_NEAR(r.v_max, oracle.value, 1e-6) << "seed " << seed;
  }
}

TEST(SolveMiss, SymmetryBreakingKeepsTheOptimum) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const BinaryDataset ds = RandomDataset(25, 2, 3, 200 + seed);
    SolverConfig cfg = SmallConfig();
    cfg.constraints.lambda_min = -1;
    cfg.constraints.lambda_max = 1;
    const SolveResult with = SolveMiss(ds, cfg);
    cfg.symmetry_breaking = false;
    const SolveResult without = SolveMiss(ds, cfg);
    EXPECT_EQ(with.status, SolveStatus::kOptimal);
    EXPECT_EQ(without.status, SolveStatus::kOptimal);
    EXPECT_NEAR(with.v_max, without.v_max, 1e-9) << "seed " << seed;
  }
}

TEST(SolveMiss, ZeroModelSizeGivesBiasOnlyModel) {
  const BinaryDataset ds = RandomDataset(24, 3, 3, 5);
  SolverConfig cfg = SmallConfig();
  cfg.constraints.r_max = 0;
  const SolveResult r = SolveMiss(ds, cfg);
  for (Eigen::Index j = 1; j < r.lambda.rows(); ++j) EXPECT_FALSE(r.lambda.row(j).any());
  EXPECT_NEAR(r.v_max, BruteForceOptimum(ds, -2, 2, -3, 3, cfg.c0, 0).value, 1e-6);
}

TEST(SolveMiss, BalancedClassesBiasOnlyEqualsZeroModel) {
  const BinaryDataset ds = SeparableToy();
  SolverConfig cfg = SmallConfig();
  cfg.constraints.r_max = 0;
  const SolveResult r = SolveMiss(ds, cfg);
  EXPECT_NEAR(r.v_max, std::log(2.0), 1e-12);
}

TEST(SolveMiss, TinyTimeLimitStillReturnsValidModel) {
  const BinaryDataset ds = RandomDataset(150, 12, 3, 11);
  SolverConfig cfg;
  cfg.time_limit_seconds = 0.01;
  const SolveResult r = SolveMiss(ds, cfg);
  EXPECT_GE(r.gap, 0.0);
  EXPECT_LE(r.gap, 1.0);
  EXPECT_LE(r.v_min, r.v_max + 1e-9);
  EXPECT_NO_THROW(r.ToModel(ds, cfg));
}

TEST(SolveMiss, ForceExcludeZeroesRow) {
  const BinaryDataset ds = SeparableToy();
  SolverConfig cfg = SmallConfig();
  cfg.constraints.force_exclude = {0};
  const SolveResult r = SolveMiss(ds, cfg);
  EXPECT_FALSE(r.lambda.row(1).any());
}

TEST(SolveMiss, ForceIncludeActivatesRow) {
  const BinaryDataset ds = SeparableToy();
  SolverConfig cfg = SmallConfig();
  cfg.constraints.force_include = {1};
  const SolveResult r = SolveMiss(ds, cfg);
  EXPECT_TRUE(r.lambda.row(2).any());
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
}

TEST(SolveMiss, TooManyForcedFeaturesIsInfeasible) {
  const BinaryDataset ds = SeparableToy();
  SolverConfig cfg = SmallConfig();
  cfg.constraints.r_max = 1;
  cfg.constraints.force_include = {0, 1};
  EXPECT_THROW(SolveMiss(ds, cfg), InfeasibleError);
}

TEST(SolveMiss, DeterministicUnderNodeLimit) {
  const BinaryDataset ds = RandomDataset(120, 8, 3, 21);
  SolverConfig cfg;
  cfg.node_limit = 40;
  const SolveResult a = SolveMiss(ds, cfg);
  const SolveResult b = SolveMiss(ds, cfg);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.v_max, b.v_max);
  EXPECT_EQ(a.v_min, b.v_min);
  EXPECT_EQ(a.stats.nodes_processed, b.stats.nodes_processed);
}

TEST(SelectBranchEntry, MostFractionalWins) {
  RealMatrix m(1, 3);
  m << 1.5, 2.0, 0.9;
  EXPECT_EQ(SelectBranchEntry(m), (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(SelectBranchEntry, TiesGoToLowestIndex) {
  RealMatrix m(2, 1);
  m << 0.4, 0.6;
  EXPECT_EQ(SelectBranchEntry(m), (std::pair<std::size_t, std::size_t>{0, 0}));
}

TEST(SelectBranchEntry, IntegralInputThrows) {
  RealMatrix m(1, 2);
  m << 1.0, -2.0;
  EXPECT_THROW(SelectBranchEntry(m), Error);
}

TEST(OptimalityGap, Formula) {
  EXPECT_EQ(OptimalityGap(0.7, 0.7), 0.0);
  EXPECT_EQ(OptimalityGap(0.5, 1.0), 0.5);
  EXPECT_EQ(OptimalityGap(0.0, 0.0), 0.0);
  EXPECT_EQ(OptimalityGap(2.0, 1.0), 0.0);
  EXPECT_THROW(OptimalityGap(-1.0, 1.0), Error);
}

TEST(FormatProgress, KeyValueLine) {
  ProgressEvent e{1.5, 10, 0.25, 0.5, 0.5};
  EXPECT_EQ(FormatProgress(e), "elapsed=1.500 nodes=10 v_min=0.25 v_max=0.5 gap=0.5");
}

}  // namespace
}  // namespace miss
