#include "lyafun/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "lyafun/error.hpp"

namespace lyafun {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

double tricube(double u)
{
  if (u >= 1.0) {
    return 0.0;
  }
  const double c = 1.0 - u * u * u;
  return c * c * c;
}

struct InRange {
  std::vector<double> x;
  std::vector<double> y;
};

InRange extract(const RawSpectrum& spectrum, WavelengthRange range)
{
  InRange out;
  for (const auto& s : spectrum.samples()) {
    if (range.contains(s.wavelength)) {
      out.x.push_back(s.wavelength);
      out.y.push_back(s.flux);
    }
  }
  return out;
}

void check_range(WavelengthRange range)
{
  if (!(range.hi > range.lo)) {
    throw ValidationError("smoothing range must satisfy lo < hi");
  }
}

} // namespace

void SmootherConfig::validate() const
{
  if (!(span > 0.0 && span <= 1.0)) {
    throw ValidationError("smoother span must lie in (0, 1]");
  }
  if (candidate_spans.empty()) {
    throw ValidationError("smoother needs at least one candidate span");
  }
  for (double s : candidate_spans) {
    if (!(s > 0.0 && s <= 1.0)) {
      throw ValidationError("candidate spans must lie in (0, 1]");
    }
  }
}

namespace detail {

std::size_t span_neighbors(double span, std::size_t n)
{
  const auto q = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(q, std::min<std::size_t>(3, n), n);
}

double local_quadratic(std::span<const double> x, std::span<const double> y, double x0, std::size_t q)
{
  const std::size_t n = x.size();
  q = std::clamp<std::size_t>(q, 1, n);

  // grow the window [lo, hi) outward from x0, nearest sample first
  std::size_t hi = static_cast<std::size_t>(std::lower_bound(x.begin(), x.end(), x0) - x.begin());
  std::size_t lo = hi;
  auto left_gap = [&] { return lo > 0 ? x0 - x[lo - 1] : infinity; };
  auto right_gap = [&] { return hi < n ? x[hi] - x0 : infinity; };
  for (std::size_t k = 0; k < q; ++k) {
    if (left_gap() <= right_gap()) {
      --lo;
    } else {
      ++hi;
    }
  }
  double h = std::max(x0 - x[lo], x[hi - 1] - x0);

  auto distinct_inside = [&] {
    std::size_t count = 0;
    double last = -infinity;
    for (std::size_t i = lo; i < hi; ++i) {
      if (std::abs(x[i] - x0) < h && x[i] != last) {
        ++count;
        last = x[i];
      }
    }
    return count;
  };

  while (distinct_inside() < 3) {
    const double next = std::min(left_gap(), right_gap());
    if (next == infinity) {
      std::ostringstream msg;
      msg << "singular local design at " << x0 << " A: fewer than 3 distinct wavelengths in the window";
      throw NumericalError(msg.str());
    }
    while (left_gap() == next) {
      --lo;
    }
    while (right_gap() == next) {
      ++hi;
    }
    h = next;
  }

  // weighted normal equations in the scaled offset t = (x - x0) / h
  double s[5] = {0, 0, 0, 0, 0};
  double r[3] = {0, 0, 0};
  for (std::size_t i = lo; i < hi; ++i) {
    const double t = (x[i] - x0) / h;
    const double w = tricube(std::abs(t));
    if (w == 0.0) {
      continue;
    }
    const double t2 = t * t;
    s[0] += w;
    s[1] += w * t;
    s[2] += w * t2;
    s[3] += w * t2 * t;
    s[4] += w * t2 * t2;
    r[0] += w * y[i];
    r[1] += w * t * y[i];
    r[2] += w * t2 * y[i];
  }
  Eigen::Matrix3d normal;
  normal << s[0], s[1], s[2],
            s[1], s[2], s[3],
            s[2], s[3], s[4];
  const Eigen::Vector3d rhs(r[0], r[1], r[2]);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  lu.setThreshold(1e-12);
  if (lu.rank() < 3) {
    std::ostringstream msg;
    msg << "singular local design at " << x0 << " A";
    throw NumericalError(msg.str());
  }
  return lu.solve(rhs)(0);
}

} // namespace detail

Curve smooth(const RawSpectrum& spectrum, WavelengthRange range, const SmootherConfig& config,
             const GridPtr& output_grid)
{
  config.validate();
  check_range(range);
  const auto data = extract(spectrum, range);
  constexpr std::size_t min_samples = 3 * (SmootherConfig::degree + 1);
  if (data.x.size() < min_samples) {
    std::ostringstream msg;
    msg << "smoothing range [" << range.lo << ", " << range.hi << "] A holds " << data.x.size()
        << " samples; at least " << min_samples << " are required";
    throw ValidationError(msg.str());
  }
  if (output_grid->front() < range.lo || output_grid->back() > range.hi) {
    throw ValidationError("smoothing output grid must lie inside the smoothing range");
  }
  const std::size_t q = detail::span_neighbors(config.span, data.x.size());
  std::vector<double> values(output_grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = detail::local_quadratic(data.x, data.y, (*output_grid)[i], q);
  }
  return Curve(output_grid, std::move(values));
}

SpanSelection select_span_cv(const RawSpectrum& spectrum, WavelengthRange range, const SmootherConfig& config)
{
  config.validate();
  check_range(range);
  const auto data = extract(spectrum, range);
  if (data.x.size() < 20) {
    std::ostringstream msg;
    msg << "span cross-validation needs at least 20 samples in range; got " << data.x.size();
    throw ValidationError(msg.str());
  }

  InRange folds[2];
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    folds[i % 2].x.push_back(data.x[i]);
    folds[i % 2].y.push_back(data.y[i]);
  }

  SpanSelection out;
  out.candidates = config.candidate_spans;
  out.errors.reserve(out.candidates.size());
  for (double span : out.candidates) {
    double total = 0.0;
    try {
      for (int fit = 0; fit < 2; ++fit) {
        const auto& train = folds[fit];
        const auto& held = folds[1 - fit];
        const std::size_t q = detail::span_neighbors(span, train.x.size());
        for (std::size_t i = 0; i < held.x.size(); ++i) {
          const double resid = held.y[i] - detail::local_quadratic(train.x, train.y, held.x[i], q);
          total += resid * resid;
        }
      }
    } catch (const NumericalError&) {
      total = infinity;
    }
    out.errors.push_back(total);
  }

  const double best = *std::min_element(out.errors.begin(), out.errors.end());
  if (best == infinity) {
    throw NumericalError("span cross-validation: no candidate span could be fitted");
  }
  double energy = 0.0;
  for (double v : data.y) {
    energy += v * v;
  }
  // errors this close to the minimum count as ties
  const double tol = 1e-12 * energy;
  out.span = -infinity;
  for (std::size_t c = 0; c < out.candidates.size(); ++c) {
    if (out.errors[c] <= best + tol) {
      out.span = std::max(out.span, out.candidates[c]);
    }
  }
  return out;
}

} // namespace lyafun
