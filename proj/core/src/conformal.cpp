#include "lyafun/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lyafun/error.hpp"
#include "lyafun/random.hpp"

namespace lyafun {

namespace {

void check_alpha(double alpha)
{
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
}

} // namespace

std::size_t conformal_rank(std::size_t calibration_size, double alpha)
{
  check_alpha(alpha);
  // the small offset keeps products such as 10 * 0.1 from rounding below an integer
  const double scaled = static_cast<double>(calibration_size + 1) * alpha;
  return static_cast<std::size_t>(std::floor(scaled + 1e-9));
}

ConformalCalibration::ConformalCalibration(FittedRegression model, std::vector<double> scores, double alpha,
                                           std::uint64_t split_seed, std::vector<std::size_t> fit_indices,
                                           std::vector<std::size_t> calibration_indices)
  : model_(std::move(model))
  , scores_(std::move(scores))
  , alpha_(alpha)
  , split_seed_(split_seed)
  , fit_indices_(std::move(fit_indices))
  , calibration_indices_(std::move(calibration_indices))
{
  check_alpha(alpha_);
  if (scores_.empty()) {
    throw ValidationError("conformal calibration needs at least one calibration score");
  }
  for (double s : scores_) {
    if (!std::isfinite(s) || s > 0.0) {
      throw ValidationError("conformity scores must be finite and <= 0");
    }
  }
  sorted_scores_ = scores_;
  std::sort(sorted_scores_.begin(), sorted_scores_.end());
}

double ConformalCalibration::half_width(double alpha) const
{
  const std::size_t k = conformal_rank(sorted_scores_.size(), alpha);
  if (k == 0) {
    return std::numeric_limits<double>::infinity();
  }
  // k <= n2 because alpha < 1
  return -sorted_scores_[std::min(k, sorted_scores_.size()) - 1];
}

Curve ConformalBand::lower() const
{
  if (degenerate) {
    throw ValidationError("a degenerate band has no finite lower envelope");
  }
  return center + (-half_width);
}

Curve ConformalBand::upper() const
{
  if (degenerate) {
    throw ValidationError("a degenerate band has no finite upper envelope");
  }
  return center + half_width;
}

double conformity_score(const FittedRegression& model, const Curve& x, const Curve& y)
{
  const Curve prediction = model.predict(x);
  require_same_grid(prediction, y, "conformity_score");
  return -sup_distance(y, prediction);
}

ConformalCalibration calibrate(std::span<const CurvePair> sample, double alpha, const SemimetricSpec& semimetric,
                               const QuadraticKernel& kernel, std::vector<std::size_t> kappa_candidates,
                               std::uint64_t split_seed)
{
  check_alpha(alpha);
  const std::size_t n = sample.size();
  if (n < 4) {
    std::ostringstream msg;
    msg << "conformal calibration needs at least 4 pairs; got " << n;
    throw ValidationError(msg.str());
  }
  if (kappa_candidates.empty()) {
    throw ValidationError("conformal calibration needs at least one kappa candidate");
  }

  // sample n1 indices without replacement (partial Fisher-Yates)
  const std::size_t n1 = n / 2;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(split_seed);
  for (std::size_t i = 0; i < n1; ++i) {
    const std::size_t j = i + rng.index(n - i);
    std::swap(order[i], order[j]);
  }
  std::vector<std::size_t> fit_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n1));
  std::vector<std::size_t> cal_idx(order.begin() + static_cast<std::ptrdiff_t>(n1), order.end());
  std::sort(fit_idx.begin(), fit_idx.end());
  std::sort(cal_idx.begin(), cal_idx.end());

  std::vector<CurvePair> fit_pairs;
  fit_pairs.reserve(n1);
  for (std::size_t i : fit_idx) {
    fit_pairs.push_back(sample[i]);
  }

  std::vector<std::size_t> usable;
  for (std::size_t k : kappa_candidates) {
    if (k >= 1 && k <= n1 - 1) {
      usable.push_back(k);
    }
  }
  std::size_t kappa = 1;
  if (usable.empty()) {
    kappa = n1 - 1;
  } else if (n1 >= 3) {
    kappa = select_kappa_cv(fit_pairs, semimetric, kernel, usable).kappa;
  }

  FittedRegression model(std::move(fit_pairs), semimetric, kappa, kernel);
  std::vector<double> scores;
  scores.reserve(cal_idx.size());
  for (std::size_t i : cal_idx) {
    scores.push_back(conformity_score(model, sample[i].predictor(), sample[i].response()));
  }
  return ConformalCalibration(std::move(model), std::move(scores), alpha, split_seed, std::move(fit_idx),
                              std::move(cal_idx));
}

ConformalBand band(const ConformalCalibration& calibration, const Curve& x, double alpha)
{
  ConformalBand out{calibration.model().predict(x), calibration.half_width(alpha), alpha, false};
  out.degenerate = std::isinf(out.half_width);
  return out;
}

ConformalBand band(const ConformalCalibration& calibration, const Curve& x)
{
  return band(calibration, x, calibration.alpha());
}

bool contains(const ConformalBand& band, const Curve& y)
{
  require_same_grid(band.center, y, "band contains");
  if (band.degenerate) {
    return true;
  }
  return sup_distance(y, band.center) <= band.half_width;
}

} // namespace lyafun
