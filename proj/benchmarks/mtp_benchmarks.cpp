#include <benchmark/benchmark.h>

#include <random>

#include "mtp/criteria.hpp"
#include "mtp/dimension.hpp"
#include "mtp/geometry.hpp"
#include "mtp/number_theory.hpp"
#include "mtp/transference.hpp"

using namespace mtp;

namespace {

void BM_FiveRSelect(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::vector<Ball> balls;
  for (int i = 0; i < state.range(0); ++i) {
    balls.push_back(Ball::interval(make_rational(static_cast<long>(rng() % 4096), 4096),
                                   make_rational(static_cast<long>(rng() % 64) + 1, 4096)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(five_r_select(balls));
}
BENCHMARK(BM_FiveRSelect)->Arg(100)->Arg(500)->Arg(2000);

void BM_UnionMeasure2D(benchmark::State& state) {
  std::mt19937_64 rng(11);
  std::vector<Ball> balls;
  for (int i = 0; i < state.range(0); ++i) {
    balls.push_back(Ball({make_rational(static_cast<long>(rng() % 256), 256),
                          make_rational(static_cast<long>(rng() % 256), 256)},
                         make_rational(static_cast<long>(rng() % 16) + 1, 256)));
  }
  for (auto _ : state) benchmark::DoNotOptimize(union_measure(balls));
}
BENCHMARK(BM_UnionMeasure2D)->Arg(50)->Arg(200);

void BM_TotientSum(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(totient_sum(static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_TotientSum)->Arg(1 << 16)->Arg(1 << 24);

void BM_SumConjecture1(benchmark::State& state) {
  auto psi = ApproximatingFunction::power(1);
  for (auto _ : state) benchmark::DoNotOptimize(sum_conjecture1(psi, 1, static_cast<std::uint64_t>(state.range(0))));
}
BENCHMARK(BM_SumConjecture1)->Arg(1000);

void BM_KgbSelect(benchmark::State& state) {
  BallFamily family(ApproximatingFunction::power(2), 1, Coprimality::Pairwise);
  auto f = DimensionFunction::power(make_rational(2, 3));
  auto g = DimensionFunction::power(1);
  Ball b = Ball::interval(make_rational(41421356, 100000000), pow2(-10));
  for (auto _ : state) {
    benchmark::DoNotOptimize(kgb_select(family, family.first_index(64), b, f, g, make_rational(1, 320),
                                        std::uint64_t{1} << 50));
  }
}
BENCHMARK(BM_KgbSelect)->Unit(benchmark::kMillisecond);

void BM_BuildDemoTree(benchmark::State& state) {
  BallFamily family(ApproximatingFunction::power(2), 1, Coprimality::Pairwise);
  auto f = DimensionFunction::power(make_rational(2, 3));
  auto g = DimensionFunction::power(1);
  auto params = ConstructionParams::defaults(1, Mode::Demo);
  params.depth = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_cantor(family, default_root(1), f, g, params));
}
BENCHMARK(BM_BuildDemoTree)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_BoxCount(benchmark::State& state) {
  auto psi = ApproximatingFunction::power(2);
  std::vector<std::int64_t> scales{64, 128, 256, state.range(0)};
  for (auto _ : state) benchmark::DoNotOptimize(box_dim_estimate(psi, 1, scales));
}
BENCHMARK(BM_BoxCount)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
