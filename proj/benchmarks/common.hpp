#pragma once

#include <memory>
#include <random>
#include <vector>

#include <lyafun/curves.hpp>

namespace bench {

inline lyafun::GridPtr grid(double lo, double hi, std::size_t n)
{
  return std::make_shared<const lyafun::WavelengthGrid>(lyafun::WavelengthGrid::uniform(lo, hi, n));
}

inline lyafun::Curve noise_curve(const lyafun::GridPtr& g, std::mt19937_64& rng)
{
  std::normal_distribution<double> z;
  std::vector<double> v(g->size());
  for (auto& x : v) {
    x = 1.0 + 0.1 * z(rng);
  }
  return lyafun::Curve(g, std::move(v));
}

//! n pairs on the default analysis grids (300 predictor, 200 response points).
inline std::vector<lyafun::CurvePair> pairs(std::size_t n, std::uint64_t seed = 1)
{
  std::mt19937_64 rng(seed);
  const auto x = grid(1300.0, 1600.0, 300);
  const auto y = grid(1050.0, 1185.0, 200);
  std::vector<lyafun::CurvePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(noise_curve(x, rng), noise_curve(y, rng));
  }
  return out;
}

} // namespace bench
