#include <benchmark/benchmark.h>

#include <cmath>

#include <lyafun/smoothing.hpp>

#include "common.hpp"

using namespace lyafun;

namespace {

RawSpectrum mock_spectrum(double step)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  std::vector<SpectralSample> s;
  for (double l = 1050.0; l <= 1600.0; l += step) {
    s.push_back({l, 1.0 + 0.2 * std::sin(l / 40.0) + 0.05 * z(rng), 0.05});
  }
  return RawSpectrum(std::move(s), 0.0);
}

} // namespace

static void BM_SmoothFixedSpan(benchmark::State& state)
{
  const auto spectrum = mock_spectrum(1.0);
  const auto out = bench::grid(1300.0, 1600.0, 300);
  SmootherConfig cfg;
  cfg.span = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(smooth(spectrum, {1300.0, 1600.0}, cfg, out));
  }
}
BENCHMARK(BM_SmoothFixedSpan)->DenseRange(1, 9, 4);

static void BM_SelectSpanCv(benchmark::State& state)
{
  const auto spectrum = mock_spectrum(static_cast<double>(state.range(0)) / 10.0);
  const SmootherConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(select_span_cv(spectrum, {1300.0, 1600.0}, cfg));
  }
}
BENCHMARK(BM_SelectSpanCv)->Arg(10)->Arg(5)->Arg(2)->Unit(benchmark::kMillisecond);
