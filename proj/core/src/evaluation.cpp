#include "lyafun/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lyafun/error.hpp"

namespace lyafun {

namespace {

void require_positive(const Curve& curve, const char* what)
{
  std::ostringstream bad;
  std::size_t count = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve[i] > 0.0)) {
      if (count < 8) {
        bad << (count ? ", " : "") << curve.grid()[i];
      }
      ++count;
    }
  }
  if (count > 0) {
    std::ostringstream msg;
    msg << what << " must be positive; " << count << " non-positive value(s) at " << bad.str()
        << (count > 8 ? ", ..." : "") << " A";
    throw ValidationError(msg.str());
  }
}

double grid_average(const Curve& curve)
{
  double sum = 0.0;
  for (double v : curve.values()) {
    sum += v;
  }
  return sum / static_cast<double>(curve.size());
}

} // namespace

Curve relative_error(const Curve& prediction, const Curve& truth)
{
  require_same_grid(prediction, truth, "relative_error");
  require_positive(truth, "relative_error truth");
  std::vector<double> out(truth.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::abs(prediction[i] - truth[i]) / truth[i];
  }
  return Curve(truth.grid_ptr(), std::move(out));
}

Curve plain_error(const Curve& prediction, const Curve& truth)
{
  require_same_grid(prediction, truth, "plain_error");
  return prediction - truth;
}

Curve relative_absorption(const Curve& observed, const Curve& continuum)
{
  require_same_grid(observed, continuum, "relative_absorption");
  require_positive(continuum, "relative_absorption continuum");
  std::vector<double> out(continuum.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (observed[i] - continuum[i]) / continuum[i];
  }
  return Curve(continuum.grid_ptr(), std::move(out));
}

double type8_quantile(std::span<const double> sorted, double p)
{
  const std::size_t n = sorted.size();
  if (n == 0) {
    throw ValidationError("quantile of an empty sample");
  }
  const double nd = static_cast<double>(n);
  const double h = (nd + 1.0 / 3.0) * p + 1.0 / 3.0;
  if (h <= 1.0) {
    return sorted.front();
  }
  if (h >= nd) {
    return sorted.back();
  }
  const double lo = std::floor(h);
  const auto k = static_cast<std::size_t>(lo);
  return sorted[k - 1] + (h - lo) * (sorted[k] - sorted[k - 1]);
}

ErrorSummary summarize(std::span<const Curve> errors)
{
  if (errors.size() < 2) {
    throw ValidationError("summarize needs at least 2 curves");
  }
  for (const auto& c : errors) {
    require_same_grid(errors.front(), c, "summarize");
  }
  const auto grid = errors.front().grid_ptr();
  const std::size_t n = errors.size();
  const std::size_t p = grid->size();
  const double nd = static_cast<double>(n);

  std::vector<double> mean(p), median(p), q1(p), q3(p), lo(p), hi(p);
  std::vector<double> column(n);
  for (std::size_t k = 0; k < p; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      column[i] = errors[i][k];
    }
    const double m = std::accumulate(column.begin(), column.end(), 0.0) / nd;
    double ss = 0.0;
    for (double v : column) {
      ss += (v - m) * (v - m);
    }
    const double half = 1.96 * std::sqrt(ss / (nd - 1.0)) / std::sqrt(nd);
    std::sort(column.begin(), column.end());
    mean[k] = m;
    median[k] = type8_quantile(column, 0.5);
    q1[k] = type8_quantile(column, 0.25);
    q3[k] = type8_quantile(column, 0.75);
    lo[k] = m - half;
    hi[k] = m + half;
  }
  ErrorSummary out{Curve(grid, std::move(mean)), Curve(grid, std::move(median)), Curve(grid, std::move(q1)),
                   Curve(grid, std::move(q3)),   Curve(grid, std::move(lo)),     Curve(grid, std::move(hi))};
  out.overall_mean = grid_average(out.mean);
  out.overall_q1 = grid_average(out.q1);
  out.overall_q3 = grid_average(out.q3);
  return out;
}

double coverage_rate(std::span<const ConformalBand> bands, std::span<const Curve> truths)
{
  if (bands.size() != truths.size()) {
    std::ostringstream msg;
    msg << "coverage_rate: " << bands.size() << " bands but " << truths.size() << " truths";
    throw ValidationError(msg.str());
  }
  if (bands.empty()) {
    throw ValidationError("coverage_rate needs at least one band");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < bands.size(); ++i) {
    hits += contains(bands[i], truths[i]) ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(bands.size());
}

} // namespace lyafun
