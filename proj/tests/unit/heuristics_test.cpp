#include "miss/heuristics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

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

RealMatrix RandomReal(const SearchSpace& space, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(space.num_features());
  const auto k = static_cast<Eigen::Index>(space.num_classes());
  RealMatrix m(d + 1, k);
  for (Eigen::Index j = 0; j <= d; ++j) {
    for (Eigen::Index c = 0; c < k; ++c) {
      const IntBox& b = space.box(static_cast<std::size_t>(j), static_cast<std::size_t>(c));
      m(j, c) = std::uniform_real_distribution<double>(b.lo, b.hi)(rng);
    }
  }
  return m;
}

// Independent 1-opt check: no single entry can move to another in-box value
// that keeps the size within [r_min, r_max] and lowers the objective.
bool IsOneOpt(const IntMatrix& lambda, const BinaryDataset& ds, const SearchSpace& space, double c0) {
  const double base = NaiveObjective(lambda, ds, c0);
  IntMatrix probe = lambda;
  for (Eigen::Index j = 0; j < lambda.rows(); ++j) {
    for (Eigen::Index k = 0; k < lambda.cols(); ++k) {
      const IntBox& b = space.box(static_cast<std::size_t>(j), static_cast<std::size_t>(k));
      for (int v = b.lo; v <= b.hi; ++v) {
        probe(j, k) = v;
        if (space.IsFeasible(probe) && NaiveObjective(probe, ds, c0) < base - 1e-9) return false;
      }
      probe(j, k) = lambda(j, k);
    }
  }
  return true;
}

TEST(SequentialRounding, IntegerInputUnchanged) {
  const BinaryDataset ds = RandomDataset(20, 3, 3, 1);
  const SearchSpace space(3, 3, Boxes(-2, 2, -3, 3, 3));
  IntMatrix m(4, 3);
  m << 1, 0, -1, 2, 0, 0, 0, -1, 1, 0, 0, 0;
  EXPECT_EQ(SequentialRounding(m.cast<double>(), ds, space, 1e-3), m);
}

TEST(SequentialRounding, SingleEntryPicksBetterNeighbour) {
  const BinaryDataset ds = RandomDataset(25, 2, 2, 2);
  const SearchSpace space(2, 2, Boxes(-3, 3, -3, 3, 2));
  RealMatrix m = RealMatrix::Zero(3, 2);
  m(1, 0) = 1.4;
  m(0, 1) = 1.0;
  IntMatrix lo = m.cast<int>(), hi = lo;
  lo(1, 0) = 1;
  hi(1, 0) = 2;
  const IntMatrix out = SequentialRounding(m, ds, space, 1e-3);
  const double best = std::min(NaiveObjective(lo, ds, 1e-3), NaiveObjective(hi, ds, 1e-3));
  EXPECT_TRUE(out == lo || out == hi);
  EXPECT_NEAR(NaiveObjective(out, ds, 1e-3), best, 1e-12);
}

TEST(SequentialRounding, NoBetterThanExhaustiveRounding) {
  std::mt19937_64 rng(3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const BinaryDataset ds = RandomDataset(30, 2, 2, seed);
    const SearchSpace space(2, 2, Boxes(-3, 3, -3, 3, 2));
    RealMatrix m = RealMatrix::Zero(3, 2);
    std::vector<Eigen::Index> frac;
    for (Eigen::Index e = 0; e < m.size(); ++e) {
      if (frac.size() < 4 && (e + static_cast<Eigen::Index>(seed)) % 2 == 0) {
        m.data()[e] = std::uniform_real_distribution<double>(-2.9, 2.9)(rng);
        frac.push_back(e);
      } else {
        m.data()[e] = std::uniform_int_distribution<int>(-2, 2)(rng);
      }
    }
    double best = INFINITY;
    for (unsigned mask = 0; mask < (1u << frac.size()); ++mask) {
      IntMatrix r = m.array().round().cast<int>();
      for (std::size_t i = 0; i < frac.size(); ++i) {
        const double v = m.data()[frac[i]];
        r.data()[frac[i]] = static_cast<int>((mask >> i) & 1u ? std::ceil(v) : std::floor(v));
      }
      best = std::min(best, NaiveObjective(r, ds, 1e-3));
    }
    const IntMatrix out = SequentialRounding(m, ds, space, 1e-3);
    EXPECT_GE(NaiveObjective(out, ds, 1e-3), best - 1e-12) << "seed " << seed;
  }
}

TEST(SequentialRounding, AlwaysFeasible) {
  std::mt19937_64 rng(4);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const BinaryDataset ds = RandomDataset(30, d, 3, seed);
    ConstraintOptions o = Boxes(-3, 3, -5, 5, static_cast<int>(1 + seed % 2));
    if (seed % 5 == 0) o.force_include = {1};
    if (seed % 7 == 0) o.force_exclude = {0};
    const SearchSpace space(d, 3, o);
    const IntMatrix out = SequentialRounding(RandomReal(space, rng), ds, space, 1e-3);
    EXPECT_TRUE(space.IsFeasible(out)) << "seed " << seed;
    EXPECT_LE(ModelSize(out), space.r_max());
  }
}

TEST(SequentialRounding, HonoursMinimumSize) {
  const BinaryDataset ds = RandomDataset(30, 4, 2, 5);
  ConstraintOptions o = Boxes(-2, 2, -2, 2, 3);
  o.r_min = 2;
  const SearchSpace space(4, 2, o);
  const IntMatrix out = SequentialRounding(RealMatrix::Zero(5, 2), ds, space, 1e-3);
  EXPECT_TRUE(space.IsFeasible(out));
  EXPECT_GE(ModelSize(out), 2);
}

TEST(PolishOneOpt, OutputIsOneOpt) {
  std::mt19937_64 rng(6);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const std::size_t k = 2 + seed % 2;
    const BinaryDataset ds = RandomDataset(40, d, k, seed);
    const SearchSpace space(d, k, Boxes(-3, 3, -4, 4, static_cast<int>(1 + seed % d)));
    const IntMatrix start = SequentialRounding(RandomReal(space, rng), ds, space, 1e-3);
    const IntMatrix out = PolishOneOpt(start, ds, space, 1e-3);
    EXPECT_TRUE(space.IsFeasible(out));
    EXPECT_LE(NaiveObjective(out, ds, 1e-3), NaiveObjective(start, ds, 1e-3) + 1e-12);
    EXPECT_TRUE(IsOneOpt(out, ds, space, 1e-3)) << "seed " << seed;
    EXPECT_EQ(PolishOneOpt(out, ds, space, 1e-3), out);
  }
}

TEST(PolishOneOpt, LatticeOptimumIsFixed) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BinaryDataset ds = RandomDataset(30, 2, 2, 20 + seed);
    const SearchSpace space(2, 2, Boxes(-2, 2, -3, 3, 2));
    const auto opt = BruteForceOptimum(ds, -2, 2, -3, 3, 1e-3, 2);
    PolishStats stats;
    const IntMatrix out = PolishOneOpt(opt.lambda, ds, space, 1e-3, 50, &stats);
    EXPECT_NEAR(NaiveObjective(out, ds, 1e-3), opt.value, 1e-12);
    EXPECT_EQ(stats.moves, 0);
  }
}

TEST(PolishOneOpt, ActivatesPredictiveFeature) {
  // Feature 0 equals the label.
  const BinaryDataset ds(8, 2, {0, 0, 0, 1, 0, 0, 0, 1, 1, 0, 1, 1, 1, 0, 1, 1}, {0, 0, 0, 0, 1, 1, 1, 1},
                         {"a", "b"}, {"no", "yes"});
  const SearchSpace space(2, 2, Boxes(-1, 1, -3, 3, 2));
  const IntMatrix zero = IntMatrix::Zero(3, 2);
  const IntMatrix out = PolishOneOpt(zero, ds, space, 1e-3);
  EXPECT_LT(NaiveObjective(out, ds, 1e-3), NaiveObjective(zero, ds, 1e-3));
  EXPECT_TRUE(out.row(1).any());
}

TEST(PolishOneOpt, RespectsSizeLimit) {
  const BinaryDataset ds = RandomDataset(50, 5, 3, 9);
  const SearchSpace space(5, 3, Boxes(-3, 3, -5, 5, 1));
  const IntMatrix out = PolishOneOpt(IntMatrix::Zero(6, 3), ds, space, 1e-4);
  EXPECT_LE(ModelSize(out), 1);
}

TEST(FeasibleSeed, ActivatesForcedRows) {
  const BinaryDataset ds = RandomDataset(30, 4, 2, 10);
  ConstraintOptions o = Boxes(-2, 2, -2, 2, 3);
  o.force_include = {2, 3};
  const SearchSpace space(4, 2, o);
  const IntMatrix seed = FeasibleSeed(ds, space, 1e-3);
  EXPECT_TRUE(space.IsFeasible(seed));
  EXPECT_TRUE(seed.row(3).any());
  EXPECT_TRUE(seed.row(4).any());
}

}  // namespace
}  // namespace miss
