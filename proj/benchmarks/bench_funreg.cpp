#include <benchmark/benchmark.h>

#include <lyafun/conformal.hpp>
#include <lyafun/funreg.hpp>

#include "common.hpp"

using namespace lyafun;

static void BM_Predict(benchmark::State& state)
{
  const auto sample = bench::pairs(static_cast<std::size_t>(state.range(0)));
  const FittedRegression model(sample, SemimetricSpec::l2(), 8);
  const Curve x = sample.front().predictor();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Predict)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

static void BM_SelectKappaLoo(benchmark::State& state)
{
  const auto sample = bench::pairs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_kappa_cv(sample, SemimetricSpec::l2(), {}, {2, 4, 8, 16, 32}));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SelectKappaLoo)->RangeMultiplier(2)->Range(50, 400)->Complexity()->Unit(benchmark::kMillisecond);

static void BM_Calibrate(benchmark::State& state)
{
  const auto sample = bench::pairs(100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(sample, 0.1, SemimetricSpec::l2(), {}, {2, 4, 8, 16, 32}, 1));
  }
}
BENCHMARK(BM_Calibrate)->Unit(benchmark::kMillisecond);
