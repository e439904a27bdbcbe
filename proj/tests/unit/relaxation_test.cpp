#include "miss/relaxation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "miss/loss.hpp"
#include "miss/model.hpp"
#include "oracles.hpp"

namespace miss {
namespace {

using testing::BruteForceOptimum;
using testing::NaiveObjective;
using testing::RandomDataset;

ConstraintOptions Boxes(int lo, int hi, int bias_lo, int bias_hi, int r_max) {
  ConstraintOptions o;
  o.lambda_min = lo;
  o.lambda_max = hi;
  o.bias_min = bias_lo;
  o.bias_max = bias_hi;
  o.r_max = r_max;
  return o;
}

// Calls `visit` with every integer matrix inside `boxes`.
void ForEachLattice(std::size_t rows, std::size_t cols, const std::vector<IntBox>& boxes,
                    const std::function<void(const IntMatrix&)>& visit) {
  IntMatrix m(rows, cols);
  for (std::size_t e = 0; e < boxes.size(); ++e) m(e / cols, e % cols) = boxes[e].lo;
  while (true) {
    visit(m);
    std::size_t e = 0;
    for (; e < boxes.size(); ++e) {
      int& v = m(e / cols, e % cols);
      if (v < boxes[e].hi) {
        ++v;
        break;
      }
      v = boxes[e].lo;
    }
    if (e == boxes.size()) return;
  }
}

TEST(LpRelaxation, VariableCount) {
  EXPECT_EQ(LpRelaxation::VariableCount(3, 3), 27u);
  const SearchSpace space(3, 3, Boxes(-5, 5, -20, 20, 5));
  const LpRelaxation relax(space, 1e-6, InitialBounds(space, 1e-6));
  EXPECT_EQ(relax.num_variables(), 27u);
  EXPECT_EQ(relax.LambdaVar(0, 0), 3);
  EXPECT_EQ(relax.AlphaVar(1, 0), 15);
  EXPECT_EQ(relax.BetaVar(1), 24);
}

TEST(InitialBounds, ZeroModelObjective) {
  const SearchSpace space(4, 3, Boxes(-5, 5, -20, 20, 3));
  const VariableBounds b = InitialBounds(space, 1e-6);
  EXPECT_EQ(b.l_max, std::log(3.0));
  EXPECT_EQ(b.v_max, std::log(3.0) + 3e-6);
  EXPECT_EQ(b.v_min, 0.0);
  EXPECT_EQ(b.r_max, 3);
}

TEST(TightenBounds, SizeBoundFromGap) {
  VariableBounds b;
  b.r_max = 5;
  b.l_min = 0.6999965;
  EXPECT_EQ(TightenBounds(&b, 1e-6, 0.7, 0.0), TightenOutcome::kTightened);
  EXPECT_EQ(b.r_max, 3);
}

TEST(TightenBounds, IncumbentEqualsBoundClosesGap) {
  VariableBounds b;
  b.r_max = 4;
  b.v_max = 1.0;
  b.l_max = 1.0;
  TightenBounds(&b, 1e-3, 0.8, 0.8);
  EXPECT_EQ(b.v_min, b.v_max);
}

TEST(TightenBounds, CrossingIsEmpty) {
  VariableBounds b;
  b.r_max = 2;
  EXPECT_EQ(TightenBounds(&b, 1e-3, 0.5, 0.6), TightenOutcome::kEmpty);
}

TEST(TightenBounds, NeverLoosensAndFixpointIsStable) {
  VariableBounds b;
  b.r_max = 3;
  b.v_max = 0.9;
  b.l_max = 0.9;
  TightenBounds(&b, 1e-2, 0.85, 0.8);
  const VariableBounds after = b;
  EXPECT_EQ(TightenBounds(&b, 1e-2, 0.95, 0.1), TightenOutcome::kUnchanged);
  EXPECT_EQ(b, after);
}

// Every lambda whose objective is at most the incumbent keeps its V, L and R
// inside the tightened bounds.
TEST(TightenBounds, KeepsEveryImprovingPoint) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const std::size_t d = 1 + seed % 2;
    const BinaryDataset ds = RandomDataset(20, d, 2, 50 + seed);
    const double c0 = 0.02;
    const SearchSpace space(d, 2, Boxes(-2, 2, -2, 2, static_cast<int>(d)));
    const double opt = BruteForceOptimum(ds, -2, 2, -2, 2, c0, static_cast<int>(d)).value;
    const double incumbent = opt + 0.03;
    VariableBounds b = InitialBounds(space, c0);
    ASSERT_NE(TightenBounds(&b, c0, incumbent, opt - 1e-12), TightenOutcome::kEmpty);
    ForEachLattice(d + 1, 2, space.boxes(), [&](const IntMatrix& m) {
      const double loss = LossValue(m.cast<double>(), ds);
      const int size = ModelSize(m);
      const double v = loss + c0 * size;
      if (v > incumbent) return;
      EXPECT_LE(b.v_min, v + 1e-12);
      EXPECT_GE(b.v_max, v - 1e-12);
      EXPECT_LE(b.l_min, loss + 1e-12);
      EXPECT_GE(b.l_max, loss - 1e-12);
      EXPECT_LE(size, b.r_max);
      EXPECT_GE(size, b.r_min);
    });
  }
}

// The LP optimum over any sub-box never exceeds the objective of an integer
// point in that sub-box.
TEST(LpRelaxation, LowerBoundOverLocalBoxes) {
  std::mt19937_64 rng(11);
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const std::size_t d = 1 + seed % 2;
    const std::size_t k = 2 + seed % 2;
    if (d == 2 && k == 3) continue;
    const BinaryDataset ds = RandomDataset(25, d, k, seed);
    const double c0 = 0.01;
    const SearchSpace space(d, k, Boxes(-2, 2, -2, 2, static_cast<int>(d)));
    // Sub-boxes may exclude lambda = 0, so V and L stay unbounded above.
    VariableBounds bounds;
    bounds.r_max = static_cast<int>(d);
    LpRelaxation relax(space, c0, bounds);
    relax.AddCut(MakeCut(RealMatrix::Zero(d + 1, k), ds));
    std::uniform_int_distribution<int> val(-2, 2);
    for (int t = 0; t < 6; ++t) {
      RealMatrix anchor(d + 1, k);
      for (Eigen::Index e = 0; e < anchor.size(); ++e) anchor.data()[e] = val(rng);
      relax.AddCut(MakeCut(anchor, ds));
    }
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<IntBox> local = space.boxes();
      for (IntBox& box : local) {
        int a = val(rng), c = val(rng);
        if (a > c) std::swap(a, c);
        if (c - a > 2) c = a + 2;
        box = {a, c};
      }
      const LpSolution sol = relax.Solve(&local);
      ASSERT_EQ(sol.status, LpStatus::kOptimal);
      EXPECT_LE(sol.max_violation, 1e-7);
      ForEachLattice(d + 1, k, local, [&](const IntMatrix& m) {
        EXPECT_LE(sol.objective, NaiveObjective(m, ds, c0) + 1e-7);
      });
    }
  }
}

TEST(LpRelaxation, MoreCutsNeverLowerTheBound) {
  std::mt19937_64 rng(12);
  const BinaryDataset ds = RandomDataset(40, 3, 3, 12);
  const SearchSpace space(3, 3, Boxes(-3, 3, -5, 5, 3));
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  relax.AddCut(MakeCut(RealMatrix::Zero(4, 3), ds));
  double last = relax.Solve().objective;
  std::uniform_int_distribution<int> val(-3, 3);
  for (int t = 0; t < 30; ++t) {
    RealMatrix anchor(4, 3);
    for (Eigen::Index e = 0; e < anchor.size(); ++e) anchor.data()[e] = val(rng);
    relax.AddCut(MakeCut(anchor, ds));
    const LpSolution sol = relax.Solve();
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_GE(sol.objective, last - 1e-9);
    last = sol.objective;
  }
}

TEST(LpRelaxation, SolutionSatisfiesEveryCut) {
  const BinaryDataset ds = RandomDataset(30, 2, 3, 13);
  const SearchSpace space(2, 3, Boxes(-2, 2, -3, 3, 2));
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  relax.AddCut(MakeCut(RealMatrix::Zero(3, 3), ds));
  for (int t = 0; t < 8; ++t) {
    const LpSolution sol = relax.Solve();
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    for (const Cut& cut : relax.cuts()) EXPECT_GE(sol.loss, cut.Evaluate(sol.lambda) - 1e-7);
    relax.AddCut(MakeCut(sol.lambda, ds));
  }
}

TEST(LpRelaxation, DuplicateCutIsSkipped) {
  const BinaryDataset ds = RandomDataset(10, 1, 2, 1);
  const SearchSpace space(1, 2, Boxes(-2, 2, -2, 2, 1));
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  EXPECT_TRUE(relax.AddCut(MakeCut(RealMatrix::Zero(2, 2), ds)));
  EXPECT_FALSE(relax.AddCut(MakeCut(RealMatrix::Zero(2, 2), ds)));
  EXPECT_EQ(relax.num_cuts(), 1u);
}

TEST(LpRelaxation, ForcedRowsAndEmptyBoxes) {
  const BinaryDataset ds = RandomDataset(20, 2, 2, 2);
  ConstraintOptions o = Boxes(-2, 2, -2, 2, 2);
  o.force_include = {0};
  o.force_exclude = {1};
  const SearchSpace space(2, 2, o);
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  relax.AddCut(MakeCut(RealMatrix::Zero(3, 2), ds));
  const LpSolution sol = relax.Solve();
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.beta[0], 1.0, 1e-9);
  EXPECT_NEAR(sol.beta[1], 0.0, 1e-9);
  EXPECT_NEAR(sol.lambda(2, 0), 0.0, 1e-9);
  std::vector<IntBox> crossed = space.boxes();
  crossed[0] = {1, 0};
  EXPECT_EQ(relax.Solve(&crossed).status, LpStatus::kInfeasible);
}

TEST(LpRelaxation, SymmetryRowsKeepTheRootBoundValid) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const BinaryDataset ds = RandomDataset(30, 2, 3, 70 + seed);
    const double c0 = 1e-3;
    const SearchSpace space(2, 3, Boxes(-2, 2, -3, 3, 2));
    LpRelaxation relax(space, c0, InitialBounds(space, c0), true);
    relax.AddCut(MakeCut(RealMatrix::Zero(3, 3), ds));
    const LpSolution sol = relax.Solve();
    ASSERT_EQ(sol.status, LpStatus::kOptimal);
    EXPECT_LE(sol.objective, BruteForceOptimum(ds, -2, 2, -3, 3, c0, 2).value + 1e-7);
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_LE(std::abs(sol.lambda.row(j).sum()), 1.0 + 1e-7);
  }
}

TEST(LpRelaxation, LpFormatNamesVariables) {
  const BinaryDataset ds = RandomDataset(10, 1, 2, 3);
  const SearchSpace space(1, 2, Boxes(-1, 1, -1, 1, 1));
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  relax.AddCut(MakeCut(RealMatrix::Zero(2, 2), ds));
  const std::string text = relax.ToLpFormat();
  EXPECT_NE(text.find("lambda_1_0"), std::string::npos);
  EXPECT_NE(text.find("beta_1"), std::string::npos);
}

TEST(LpRelaxation, RejectsInvalidInput) {
  const SearchSpace space(2, 2, Boxes(-1, 1, -1, 1, 2));
  EXPECT_THROW(LpRelaxation(space, 0.0, InitialBounds(space, 1e-3)), Error);
  LpRelaxation relax(space, 1e-3, InitialBounds(space, 1e-3));
  Cut bad;
  bad.anchor = RealMatrix::Zero(2, 2);
  bad.gradient = RealMatrix::Zero(2, 2);
  EXPECT_THROW(relax.AddCut(bad), Error);
}

}  // namespace
}  // namespace miss
