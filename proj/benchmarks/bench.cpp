#include <random>

#include <benchmark/benchmark.h>

#include "dialstruct/decode.hpp"
#include "dialstruct/mutual.hpp"

using namespace dialstruct;

namespace {

ScoreMatrix random_upper(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n * (n - 1) / 2);
  for (auto& x : v) x = u(rng);
  return ScoreMatrix::from_upper(n, v);
}

void BM_Eisner(benchmark::State& state) {
  const auto m = random_upper(std::size_t(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eisner(m));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eisner)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_TextTiling(benchmark::State& state) {
  const auto m = random_upper(std::size_t(state.range(0)), 2);
  const TilingConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(texttiling(m, cfg));
}
BENCHMARK(BM_TextTiling)->RangeMultiplier(2)->Range(8, 256);

void BM_Fuse(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto a = random_upper(n, 3);
  const auto b = random_upper(n, 4);
  const auto p = ModelParams::identity(24);
  for (auto _ : state) benchmark::DoNotOptimize(fuse(a, b, p));
}
BENCHMARK(BM_Fuse)->DenseRange(8, 24, 8);

void BM_Gradients(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto a = random_upper(n, 5);
  const auto b = random_upper(n, 6);
  TrainConfig cfg;
  const auto p = init_params(cfg);
  for (auto _ : state) benchmark::DoNotOptimize(gradients(a, b, p, cfg));
}
BENCHMARK(BM_Gradients)->DenseRange(8, 24, 8);

}  // namespace

BENCHMARK_MAIN();
