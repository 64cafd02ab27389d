#pragma once

#include <span>
#include <vector>

#include "lyafun/conformal.hpp"
#include "lyafun/curves.hpp"

namespace lyafun {

//! |prediction - truth| / truth, pointwise. truth must be positive.
Curve relative_error(const Curve& prediction, const Curve& truth);

//! prediction - truth, pointwise.
Curve plain_error(const Curve& prediction, const Curve& truth);

//! (observed - continuum) / continuum, pointwise.
Curve relative_absorption(const Curve& observed, const Curve& continuum);

//! Per-wavelength statistics of a set of error curves.
struct ErrorSummary {
  Curve mean;
  Curve median;
  Curve q1;
  Curve q3;
  //! mean -/+ 1.96 * sd / sqrt(n), sd with divisor n - 1.
  Curve ci_lower;
  Curve ci_upper;
  //! Grid averages of the mean, q1 and q3 curves.
  double overall_mean = 0.0;
  double overall_q1 = 0.0;
  double overall_q3 = 0.0;

  const WavelengthGrid& grid() const { return mean.grid(); }
};

//! Quantile by linear interpolation of order statistics with the
//! median-unbiased plotting position (Hyndman-Fan type 8).
double type8_quantile(std::span<const double> sorted, double p);

ErrorSummary summarize(std::span<const Curve> errors);

//! Share of curves contained in their band.
double coverage_rate(std::span<const ConformalBand> bands, std::span<const Curve> truths);

} // namespace lyafun
