#pragma once

// Small builders shared by the unit tests.

#include <atomic>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <unistd.h>

#include <lyafun/curves.hpp>

#include "oracles.hpp"

namespace fixture {

inline lyafun::GridPtr grid(double lo, double hi, std::size_t n)
{
  return std::make_shared<const lyafun::WavelengthGrid>(lyafun::WavelengthGrid::uniform(lo, hi, n));
}

inline lyafun::Curve random_curve(const lyafun::GridPtr& g, oracle::TestRng& rng, double scale = 1.0)
{
  std::vector<double> v(g->size());
  for (auto& x : v) {
    x = scale * rng.normal();
  }
  return lyafun::Curve(g, std::move(v));
}

//! Smooth random curve: a few random low-frequency cosines plus an offset.
inline lyafun::Curve smooth_random_curve(const lyafun::GridPtr& g, oracle::TestRng& rng)
{
  const double a0 = 1.0 + 0.2 * rng.normal();
  const double a1 = 0.3 * rng.normal();
  const double a2 = 0.2 * rng.normal();
  const double ph = 6.283185307179586 * rng.uniform();
  std::vector<double> v(g->size());
  const double lo = g->front();
  const double w = g->back() - g->front();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = ((*g)[i] - lo) / w;
    v[i] = a0 + a1 * std::cos(3.14159 * s + ph) + a2 * std::sin(6.28318 * s);
  }
  return lyafun::Curve(g, std::move(v));
}

inline std::vector<double> values(const lyafun::Curve& c)
{
  return {c.values().begin(), c.values().end()};
}

inline std::vector<double> points(const lyafun::WavelengthGrid& g)
{
  return {g.points().begin(), g.points().end()};
}

//! Predictor grid above the response grid, as the pair invariant demands.
struct PairGrids {
  lyafun::GridPtr x = grid(1300.0, 1600.0, 31);
  lyafun::GridPtr y = grid(1050.0, 1185.0, 21);
};

inline std::vector<lyafun::CurvePair> random_pairs(std::size_t n, oracle::TestRng& rng,
                                                   const PairGrids& grids = {})
{
  std::vector<lyafun::CurvePair> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(random_curve(grids.x, rng), random_curve(grids.y, rng));
  }
  return out;
}

inline lyafun::RawSpectrum spectrum(const std::vector<double>& x, const std::vector<double>& y, double z = 0.0)
{
  std::vector<lyafun::SpectralSample> s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s.push_back({x[i], y[i], 0.0});
  }
  return lyafun::RawSpectrum(std::move(s), z);
}

//! Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
  explicit TempDir(const std::string& tag)
  {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("lyafun_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

private:
  std::filesystem::path path_;
};

} // namespace fixture
