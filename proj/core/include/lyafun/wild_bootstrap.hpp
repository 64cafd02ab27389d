#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lyafun/fpca.hpp"
#include "lyafun/funreg.hpp"

namespace lyafun {

//! Two-point multiplier law with E V = 0, E V^2 = E V^3 = 1.
namespace golden_v {
inline const double low = (1.0 - std::sqrt(5.0)) / 2.0;
inline const double high = (1.0 + std::sqrt(5.0)) / 2.0;
inline const double low_probability = 0.1 * (5.0 + std::sqrt(5.0));
inline const double high_probability = 0.1 * (5.0 - std::sqrt(5.0));
} // namespace golden_v

struct WildBootstrapConfig {
  std::size_t replicates = 500;
  std::size_t components = 5;
  double alpha = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

//! `count` i.i.d. multipliers from the two-point law.
std::vector<double> sample_v(std::size_t count, std::uint64_t seed);

//! Random inputs of one bootstrap replicate: which residual each pair draws
//! (with replacement) and the multiplier applied to it.
struct ReplicateDraws {
  std::vector<std::size_t> residual_index;
  std::vector<double> multiplier;
};

//! Draws for replicate `replicate`; each replicate has its own stream derived
//! from `seed`, so replicates can be computed in any order.
ReplicateDraws draw_replicate(std::uint64_t seed, std::size_t replicate, std::size_t n);

//! Nearest-rank empirical quantile: the ceil(level * B)-th smallest value
//! (at least the first).
double nearest_rank_quantile(std::vector<double> values, double level);

struct CoefficientInterval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapBand {
  //! Bonferroni intervals per component, levels alpha/(2m) and 1 - alpha/(2m).
  std::vector<CoefficientInterval> intervals;
  //! Scores of the point estimate r(x).
  std::vector<double> point_coefficients;
  //! Projection of r(x) onto the retained components (mean added back).
  Curve center;
  //! Pointwise extremes of mean + sum a_j phi_j over the coefficient box.
  Curve lower;
  Curve upper;
  double alpha = 0.0;
  std::size_t replicates = 0;
};

//! Functional wild bootstrap at `x`: residuals of the fit are resampled with
//! replacement, scaled by two-point multipliers, added to the fitted values,
//! pushed through the estimator with the original kernel weights at `x` and
//! projected on the first `config.components` principal components.
BootstrapBand bootstrap_bands(std::span<const CurvePair> sample, const FittedRegression& model, const Curve& x,
                              const FpcaModel& fpca, const WildBootstrapConfig& config);

} // namespace lyafun
