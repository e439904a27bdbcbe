#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "miss/heuristics.hpp"
#include "miss/loss.hpp"
#include "miss/relaxation.hpp"
#include "miss/solver.hpp"

namespace {

using miss::BinaryDataset;
using miss::RealMatrix;
using Idx = Eigen::Index;

// Labels are the argmax of a random sparse integer model plus Gumbel noise.
BinaryDataset Synthetic(std::size_t n, std::size_t d, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.3);
  std::uniform_int_distribution<int> point(-2, 2);
  std::extreme_value_distribution<double> gumbel(0.0, 1.0);
  std::vector<int> truth(d * k);
  for (int& v : truth) v = coin(rng) ? point(rng) : 0;
  std::vector<std::uint8_t> x(n * d);
  std::vector<int> labels(n);
  std::vector<double> score(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) score[c] = gumbel(rng);
    for (std::size_t j = 0; j < d; ++j) {
      x[i * d + j] = coin(rng);
      if (x[i * d + j]) {
        for (std::size_t c = 0; c < k; ++c) score[c] += truth[j * k + c];
      }
    }
    labels[i] = static_cast<int>(std::max_element(score.begin(), score.end()) - score.begin());
  }
  for (std::size_t c = 0; c < k && c < n; ++c) labels[c] = static_cast<int>(c);
  std::vector<std::string> features(d);
  for (std::size_t j = 0; j < d; ++j) features[j] = "f" + std::to_string(j);
  std::vector<std::string> classes(k);
  for (std::size_t c = 0; c < k; ++c) classes[c] = "c" + std::to_string(c);
  return BinaryDataset(n, d, std::move(x), std::move(labels), std::move(features),
                       std::move(classes));
}

RealMatrix RandomLambda(std::size_t d, std::size_t k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  RealMatrix lambda(static_cast<Idx>(d + 1), static_cast<Idx>(k));
  for (Idx e = 0; e < lambda.size(); ++e) lambda.data()[e] = coef(rng);
  return lambda;
}

// Args: n, D, K.
void BM_LossValueAndGradient(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  const BinaryDataset ds = Synthetic(n, d, k, 1);
  const RealMatrix lambda = RandomLambda(d, k, 2);
  RealMatrix gradient;
  for (auto _ : state) {
    benchmark::DoNotOptimize(miss::LossValueAndGradient(lambda, ds, &gradient));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LossValueAndGradient)->Args({150, 12, 3})->Args({2000, 20, 4})->Args({20000, 60, 5});

// Root LP with a handful of cuts. Args: D, K, cuts.
void BM_RootLpSolve(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const BinaryDataset ds = Synthetic(500, d, k, 3);
  const miss::SearchSpace space(d, k, miss::ConstraintOptions{});
  const double c0 = 1e-4;
  for (auto _ : state) {
    state.PauseTiming();
    miss::LpRelaxation lp(space, c0, miss::InitialBounds(space, c0), true);
    for (std::int64_t t = 0; t < state.range(2); ++t) {
      lp.AddCut(miss::MakeCut(RandomLambda(d, k, 10 + static_cast<std::uint64_t>(t)), ds));
    }
    state.ResumeTiming();
    benchmark::DoNotOptimize(lp.Solve().objective);
  }
}
BENCHMARK(BM_RootLpSolve)->Args({5, 3, 5})->Args({20, 4, 20})->Unit(benchmark::kMillisecond);

// 1-opt polishing from a rounded random point. Args: n, D, K.
void BM_PolishOneOpt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto k = static_cast<std::size_t>(state.range(2));
  const BinaryDataset ds = Synthetic(n, d, k, 4);
  const miss::SearchSpace space(d, k, miss::ConstraintOptions{});
  const miss::IntMatrix start = miss::SequentialRounding(RandomLambda(d, k, 5), ds, space, 1e-6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(miss::PolishOneOpt(start, ds, space, 1e-6));
  }
}
BENCHMARK(BM_PolishOneOpt)->Args({150, 12, 3})->Args({2000, 20, 4})->Unit(benchmark::kMillisecond);

// Node-limited branch and bound with a short root cut loop. Args: n, D, K.
void BM_SolveNodeLimited(benchmark::State& state) {
  const BinaryDataset ds = Synthetic(static_cast<std::size_t>(state.range(0)),
                                     static_cast<std::size_t>(state.range(1)),
                                     static_cast<std::size_t>(state.range(2)), 6);
  miss::SolverConfig cfg;
  cfg.node_limit = 50;
  cfg.root_cut_rounds = 100;
  cfg.time_limit_seconds = 60.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(miss::SolveMiss(ds, cfg).v_max);
  }
}
BENCHMARK(BM_SolveNodeLimited)->Args({150, 12, 3})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
