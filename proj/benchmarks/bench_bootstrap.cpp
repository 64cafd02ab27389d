#include <benchmark/benchmark.h>

#include <vector>

#include <lyafun/fpca.hpp>
#include <lyafun/wild_bootstrap.hpp>

#include "common.hpp"

using namespace lyafun;

static void BM_FitFpca(benchmark::State& state)
{
  const auto sample = bench::pairs(static_cast<std::size_t>(state.range(0)));
  std::vector<Curve> responses;
  for (const auto& p : sample) {
    responses.push_back(p.response());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_fpca(responses, 10));
  }
}
BENCHMARK(BM_FitFpca)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_BootstrapBand(benchmark::State& state)
{
  const auto sample = bench::pairs(100);
  const FittedRegression model(sample, SemimetricSpec::l2(), 8);
  std::vector<Curve> responses;
  for (const auto& p : sample) {
    responses.push_back(p.response());
  }
  const auto fpca = fit_fpca(responses, 5);
  WildBootstrapConfig cfg;
  cfg.replicates = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_bands(sample, model, sample.front().predictor(), fpca, cfg));
  }
}
BENCHMARK(BM_BootstrapBand)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

static void BM_SampleV(benchmark::State& state)
{
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_v(100000, 7));
  }
}
BENCHMARK(BM_SampleV)->Unit(benchmark::kMicrosecond);
