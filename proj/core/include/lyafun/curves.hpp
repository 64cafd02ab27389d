#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace lyafun {

//! Closed wavelength interval [lo, hi] in Angstrom.
struct WavelengthRange {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double wavelength) const { return wavelength >= lo && wavelength <= hi; }
  double length() const { return hi - lo; }
  friend bool operator==(const WavelengthRange&, const WavelengthRange&) = default;
};

//! Strictly increasing, positive, finite sampling wavelengths (at least two).
//! Trapezoid quadrature weights are computed once at construction.
class WavelengthGrid {
public:
  explicit WavelengthGrid(std::vector<double> points);

  //! `count` equally spaced points from `lo` to `hi` inclusive.
  static WavelengthGrid uniform(double lo, double hi, std::size_t count);

  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }
  WavelengthRange range() const { return {front(), back()}; }
  std::span<const double> points() const { return points_; }
  std::span<const double> trapezoid_weights() const { return weights_; }

  //! Index of the grid point closest to `wavelength` (lower index on ties).
  std::size_t nearest_index(double wavelength) const;

  friend bool operator==(const WavelengthGrid& a, const WavelengthGrid& b) {
    return a.points_ == b.points_;
  }

private:
  std::vector<double> points_;
  std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const WavelengthGrid>;

//! A function sampled on a wavelength grid. Grids are shared between curves.
class Curve {
public:
  Curve(GridPtr grid, std::vector<double> values);
  Curve(const WavelengthGrid& grid, std::vector<double> values);

  static Curve constant(GridPtr grid, double value);

  const WavelengthGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend Curve operator+(const Curve& a, const Curve& b);
  friend Curve operator-(const Curve& a, const Curve& b);
  friend Curve operator*(double s, const Curve& a);
  Curve operator+(double c) const;

private:
  GridPtr grid_;
  std::vector<double> values_;
};

bool same_grid(const Curve& a, const Curve& b);
//! Throws ValidationError naming `what` when the grids differ.
void require_same_grid(const Curve& a, const Curve& b, const char* what);

struct SpectralSample {
  double wavelength = 0.0;
  double flux = 0.0;
  double noise_sd = 0.0;
  friend bool operator==(const SpectralSample&, const SpectralSample&) = default;
};

//! Irregular noisy samples of a spectrum: increasing wavelengths, non-negative
//! noise sds, at least 10 samples, redshift z >= 0.
class RawSpectrum {
public:
  static constexpr std::size_t min_samples = 10;

  RawSpectrum(std::vector<SpectralSample> samples, double redshift = 0.0);

  std::span<const SpectralSample> samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double redshift() const { return redshift_; }
  WavelengthRange range() const { return {samples_.front().wavelength, samples_.back().wavelength}; }

  //! Number of samples whose wavelength lies inside `range`.
  std::size_t count_in(WavelengthRange range) const;

  friend bool operator==(const RawSpectrum&, const RawSpectrum&) = default;

private:
  std::vector<SpectralSample> samples_;
  double redshift_ = 0.0;
};

//! Predictor curve (absorption-free side) and response curve (forest side).
//! The predictor grid lies entirely at wavelengths >= the response grid.
class CurvePair {
public:
  CurvePair(Curve predictor, Curve response);

  const Curve& predictor() const { return predictor_; }
  const Curve& response() const { return response_; }

private:
  Curve predictor_;
  Curve response_;
};

//! Divides every wavelength by (1 + z) and resets z to 0.
RawSpectrum to_rest_frame(const RawSpectrum& spectrum);

//! Linear interpolation onto `target`; exact at shared grid points.
Curve resample(const Curve& curve, const GridPtr& target);
Curve resample(const Curve& curve, const WavelengthGrid& target);

//! max |a(l) - b(l)| over the common grid.
double sup_distance(const Curve& a, const Curve& b);

//! Trapezoid-rule integral of the curve over its grid.
double integrate(const Curve& curve);

//! Trapezoid-rule inner product of two curves on a common grid.
double inner_product(const Curve& a, const Curve& b);

//! Value at the grid point nearest to `wavelength`; the divisor used to
//! normalize spectra.
double normalization_factor(const Curve& curve, double wavelength);

} // namespace lyafun
