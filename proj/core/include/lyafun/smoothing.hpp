#pragma once

#include <span>
#include <vector>

#include "lyafun/curves.hpp"

namespace lyafun {

//! Local quadratic (loess-style) smoother settings.
struct SmootherConfig {
  static constexpr int degree = 2;

  //! Fraction of the in-range samples used in each local neighborhood.
  double span = 0.3;
  //! Spans tried by two-fold cross-validation.
  std::vector<double> candidate_spans = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

  void validate() const;
};

//! Cross-validation outcome: chosen span plus the error for every candidate
//! (infinity when the candidate could not be fitted).
struct SpanSelection {
  double span = 0.0;
  std::vector<double> candidates;
  std::vector<double> errors;
};

//! Local quadratic fit with tricube weights at every `output_grid` point,
//! using the samples of `spectrum` that fall inside `range`. The noise-sd
//! column is not used.
Curve smooth(const RawSpectrum& spectrum, WavelengthRange range, const SmootherConfig& config,
             const GridPtr& output_grid);

//! Two-fold (even/odd interleaved) cross-validation over
//! `config.candidate_spans`; ties resolve toward the larger span.
SpanSelection select_span_cv(const RawSpectrum& spectrum, WavelengthRange range, const SmootherConfig& config);

namespace detail {

//! Number of neighbors a span selects out of `n` samples.
std::size_t span_neighbors(double span, std::size_t n);

//! Local quadratic estimate at `x0` from the `q` nearest of the sorted
//! abscissae `x`. Bandwidth is the q-th nearest distance, widened to the next
//! distinct distance while fewer than three distinct abscissae carry positive
//! weight. Throws NumericalError when the local design is singular.
double local_quadratic(std::span<const double> x, std::span<const double> y, double x0, std::size_t q);

} // namespace detail

} // namespace lyafun
