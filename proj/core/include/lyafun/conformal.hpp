#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lyafun/funreg.hpp"

namespace lyafun {

//! Split-conformal calibration: a regression fitted on one half of the
//! sample and the conformity scores of the other half.
class ConformalCalibration {
public:
  ConformalCalibration(FittedRegression model, std::vector<double> scores, double alpha,
                       std::uint64_t split_seed, std::vector<std::size_t> fit_indices,
                       std::vector<std::size_t> calibration_indices);

  const FittedRegression& model() const { return model_; }
  //! Conformity scores of the calibration half, in calibration order.
  const std::vector<double>& scores() const { return scores_; }
  double alpha() const { return alpha_; }
  std::uint64_t split_seed() const { return split_seed_; }
  std::size_t fit_size() const { return fit_indices_.size(); }
  std::size_t calibration_size() const { return scores_.size(); }
  const std::vector<std::size_t>& fit_indices() const { return fit_indices_; }
  const std::vector<std::size_t>& calibration_indices() const { return calibration_indices_; }

  //! Band half-width at level `alpha`; +infinity when the band is degenerate.
  double half_width(double alpha) const;

private:
  FittedRegression model_;
  std::vector<double> scores_;
  std::vector<double> sorted_scores_;
  double alpha_;
  std::uint64_t split_seed_;
  std::vector<std::size_t> fit_indices_;
  std::vector<std::size_t> calibration_indices_;
};

//! Constant-width sup-norm band around a point prediction.
struct ConformalBand {
  Curve center;
  double half_width = 0.0;
  double alpha = 0.0;
  //! True when the band is the whole response space.
  bool degenerate = false;

  Curve lower() const;
  Curve upper() const;
};

//! Rank of the calibration score used as threshold: floor((n2 + 1) * alpha).
//! Zero means the band is degenerate.
std::size_t conformal_rank(std::size_t calibration_size, double alpha);

//! -sup |y - r(x)|.
double conformity_score(const FittedRegression& model, const Curve& x, const Curve& y);

//! Seeded split into floor(n/2) fitting pairs and the calibration rest; the
//! neighbor count is re-selected on the fitting half by leave-one-out among
//! the candidates that fit its size.
ConformalCalibration calibrate(std::span<const CurvePair> sample, double alpha, const SemimetricSpec& semimetric,
                               const QuadraticKernel& kernel, std::vector<std::size_t> kappa_candidates,
                               std::uint64_t split_seed);

ConformalBand band(const ConformalCalibration& calibration, const Curve& x);
ConformalBand band(const ConformalCalibration& calibration, const Curve& x, double alpha);

bool contains(const ConformalBand& band, const Curve& y);

} // namespace lyafun
