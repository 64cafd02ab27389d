#include "lyafun/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lyafun/error.hpp"

namespace lyafun {

WavelengthGrid::WavelengthGrid(std::vector<double> points)
  : points_(std::move(points))
{
  if (points_.size() < 2) {
    throw ValidationError("wavelength grid needs at least 2 points");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || points_[i] <= 0.0) {
      std::ostringstream msg;
      msg << "wavelength grid point " << i << " is not a positive finite value (" << points_[i] << ")";
      throw ValidationError(msg.str());
    }
    if (i > 0 && points_[i] <= points_[i - 1]) {
      std::ostringstream msg;
      msg << "wavelength grid is not strictly increasing at index " << i;
      throw ValidationError(msg.str());
    }
  }
  const std::size_t n = points_.size();
  weights_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (points_[i + 1] - points_[i]);
    weights_[i] += half;
    weights_[i + 1] += half;
  }
}

WavelengthGrid WavelengthGrid::uniform(double lo, double hi, std::size_t count)
{
  if (count < 2 || !(hi > lo)) {
    throw ValidationError("uniform grid needs count >= 2 and hi > lo");
  }
  std::vector<double> pts(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    pts[i] = lo + step * static_cast<double>(i);
  }
  pts.back() = hi;
  return WavelengthGrid(std::move(pts));
}

std::size_t WavelengthGrid::nearest_index(double wavelength) const
{
  auto it = std::lower_bound(points_.begin(), points_.end(), wavelength);
  if (it == points_.begin()) {
    return 0;
  }
  if (it == points_.end()) {
    return points_.size() - 1;
  }
  const auto hi = static_cast<std::size_t>(it - points_.begin());
  const std::size_t lo = hi - 1;
  return (wavelength - points_[lo] <= points_[hi] - wavelength) ? lo : hi;
}

Curve::Curve(GridPtr grid, std::vector<double> values)
  : grid_(std::move(grid))
  , values_(std::move(values))
{
  if (!grid_) {
    throw ValidationError("curve has no grid");
  }
  if (values_.size() != grid_->size()) {
    std::ostringstream msg;
    msg << "curve has " << values_.size() << " values for a grid of " << grid_->size() << " points";
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream msg;
      msg << "curve value at " << (*grid_)[i] << " A is not finite";
      throw ValidationError(msg.str());
    }
  }
}

Curve::Curve(const WavelengthGrid& grid, std::vector<double> values)
  : Curve(std::make_shared<const WavelengthGrid>(grid), std::move(values))
{
}

Curve Curve::constant(GridPtr grid, double value)
{
  const std::size_t n = grid->size();
  return Curve(std::move(grid), std::vector<double>(n, value));
}

bool same_grid(const Curve& a, const Curve& b)
{
  return a.grid_ptr() == b.grid_ptr() || a.grid() == b.grid();
}

void require_same_grid(const Curve& a, const Curve& b, const char* what)
{
  if (!same_grid(a, b)) {
    throw ValidationError(std::string(what) + ": curves are sampled on different grids");
  }
}

Curve operator+(const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "curve addition");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values_[i] + b.values_[i];
  }
  return Curve(a.grid_, std::move(out));
}

Curve operator-(const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "curve subtraction");
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = a.values_[i] - b.values_[i];
  }
  return Curve(a.grid_, std::move(out));
}

Curve operator*(double s, const Curve& a)
{
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = s * a.values_[i];
  }
  return Curve(a.grid_, std::move(out));
}

Curve Curve::operator+(double c) const
{
  std::vector<double> out(values_);
  for (double& v : out) {
    v += c;
  }
  return Curve(grid_, std::move(out));
}

RawSpectrum::RawSpectrum(std::vector<SpectralSample> samples, double redshift)
  : samples_(std::move(samples))
  , redshift_(redshift)
{
  if (!std::isfinite(redshift_) || redshift_ < 0.0) {
    throw ValidationError("redshift must be finite and >= 0");
  }
  if (samples_.size() < min_samples) {
    std::ostringstream msg;
    msg << "spectrum has " << samples_.size() << " samples; at least " << min_samples << " are required";
    throw ValidationError(msg.str());
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (!std::isfinite(s.wavelength) || !std::isfinite(s.flux) || !std::isfinite(s.noise_sd)) {
      std::ostringstream msg;
      msg << "spectrum sample " << i << " has a non-finite field";
      throw ValidationError(msg.str());
    }
    if (s.noise_sd < 0.0) {
      std::ostringstream msg;
      msg << "spectrum sample " << i << " has negative noise sd";
      throw ValidationError(msg.str());
    }
    if (i > 0 && s.wavelength <= samples_[i - 1].wavelength) {
      std::ostringstream msg;
      msg << "spectrum wavelengths are not strictly increasing at sample " << i;
      throw ValidationError(msg.str());
    }
  }
}

std::size_t RawSpectrum::count_in(WavelengthRange range) const
{
  return static_cast<std::size_t>(std::count_if(samples_.begin(), samples_.end(),
    [&](const SpectralSample& s) { return range.contains(s.wavelength); }));
}

CurvePair::CurvePair(Curve predictor, Curve response)
  : predictor_(std::move(predictor))
  , response_(std::move(response))
{
  if (predictor_.grid().front() < response_.grid().back()) {
    throw ValidationError("predictor grid must lie at wavelengths >= the response grid");
  }
}

RawSpectrum to_rest_frame(const RawSpectrum& spectrum)
{
  const double stretch = 1.0 + spectrum.redshift();
  std::vector<SpectralSample> out(spectrum.samples().begin(), spectrum.samples().end());
  if (stretch != 1.0) {
    for (auto& s : out) {
      s.wavelength /= stretch;
    }
  }
  return RawSpectrum(std::move(out), 0.0);
}

Curve resample(const Curve& curve, const GridPtr& target)
{
  const auto src = curve.grid().points();
  const auto vals = curve.values();
  // tolerate rounding noise at the ends of the source range
  const double slack = 1e-9 * std::max(std::abs(src.front()), std::abs(src.back()));

  std::vector<double> out(target->size());
  for (std::size_t i = 0; i < target->size(); ++i) {
    double x = (*target)[i];
    if (x < src.front() - slack || x > src.back() + slack) {
      std::ostringstream msg;
      msg << "cannot extrapolate to " << x << " A: curve covers [" << src.front() << ", " << src.back() << "] A";
      throw ValidationError(msg.str());
    }
    x = std::clamp(x, src.front(), src.back());
    auto it = std::lower_bound(src.begin(), src.end(), x);
    const auto j = static_cast<std::size_t>(it - src.begin());
    if (src[j] == x) {
      out[i] = vals[j];
      continue;
    }
    const double t = (x - src[j - 1]) / (src[j] - src[j - 1]);
    out[i] = vals[j - 1] + t * (vals[j] - vals[j - 1]);
  }
  return Curve(target, std::move(out));
}

Curve resample(const Curve& curve, const WavelengthGrid& target)
{
  return resample(curve, std::make_shared<const WavelengthGrid>(target));
}

double sup_distance(const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "sup_distance");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    best = std::max(best, std::abs(a[i] - b[i]));
  }
  return best;
}

double integrate(const Curve& curve)
{
  const auto w = curve.grid().trapezoid_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    sum += w[i] * curve[i];
  }
  return sum;
}

double inner_product(const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "inner_product");
  const auto w = a.grid().trapezoid_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum += w[i] * a[i] * b[i];
  }
  return sum;
}

double normalization_factor(const Curve& curve, double wavelength)
{
  const double value = curve[curve.grid().nearest_index(wavelength)];
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "cannot normalize: flux near " << wavelength << " A is " << value;
    throw NumericalError(msg.str());
  }
  return value;
}

} // namespace lyafun
