#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lyafun/curves.hpp"
#include "lyafun/semimetrics.hpp"

namespace lyafun {

//! K(u) = 1 - u^2 on [0, 1], zero elsewhere. The normalizing constant is
//! omitted since the estimator is a ratio.
struct QuadraticKernel {
  double operator()(double u) const { return (u >= 0.0 && u <= 1.0) ? 1.0 - u * u : 0.0; }
  friend bool operator==(const QuadraticKernel&, const QuadraticKernel&) = default;
};

//! Bandwidth putting exactly `kappa` of the distances inside it: the midpoint
//! of the kappa-th and (kappa+1)-th smallest distance, or their common value
//! when they tie. Requires 1 <= kappa < distances.size().
double knn_bandwidth(std::span<const double> distances, std::size_t kappa);

//! Normalized kernel weights K(d_i / h) / sum K(d_j / h) for the kNN
//! bandwidth. Distance-zero curves get K(0). When every weight vanishes the
//! kappa nearest curves share the weight equally.
//!
//! kappa may equal distances.size() here (used by leave-one-out); the
//! bandwidth is then 1.5 times the largest distance, as if a further
//! neighbor sat at twice that distance.
std::vector<double> kernel_weights(std::span<const double> distances, std::size_t kappa,
                                   const QuadraticKernel& kernel = {});

//! Functional Nadaraya-Watson regression with a kNN bandwidth.
class FittedRegression {
public:
  FittedRegression(std::vector<CurvePair> pairs, SemimetricSpec semimetric, std::size_t kappa,
                   QuadraticKernel kernel = {});

  std::size_t size() const { return pairs_.size(); }
  std::size_t kappa() const { return kappa_; }
  const SemimetricSpec& semimetric() const { return semimetric_; }
  const QuadraticKernel& kernel() const { return kernel_; }
  const std::vector<CurvePair>& pairs() const { return pairs_; }
  const WavelengthGrid& predictor_grid() const { return pairs_.front().predictor().grid(); }
  const WavelengthGrid& response_grid() const { return pairs_.front().response().grid(); }
  const GridPtr& response_grid_ptr() const { return pairs_.front().response().grid_ptr(); }

  //! Semimetric distance from every training predictor to `x`.
  std::vector<double> distances(const Curve& x) const;
  double bandwidth(const Curve& x) const;
  std::vector<double> weights(const Curve& x) const;
  Curve predict(const Curve& x) const;

  //! Weighted combination of arbitrary responses (one per training pair),
  //! e.g. bootstrap responses, using weights from `weights()`.
  Curve combine(std::span<const double> weights, std::span<const Curve> responses) const;

private:
  std::vector<CurvePair> pairs_;
  std::vector<Curve> features_;
  SemimetricSpec semimetric_;
  std::size_t kappa_;
  QuadraticKernel kernel_;
};

struct KappaSelection {
  std::size_t kappa = 0;
  std::vector<std::size_t> candidates;
  //! Mean leave-one-out squared L2 error per candidate.
  std::vector<double> scores;
};

//! Leave-one-out choice of the neighbor count: each Y_i is predicted from the
//! other n - 1 pairs and scored by its squared L2 error; the candidate with
//! the lowest mean wins, ties going to the smaller kappa.
KappaSelection select_kappa_cv(std::span<const CurvePair> pairs, const SemimetricSpec& semimetric,
                               const QuadraticKernel& kernel, std::vector<std::size_t> candidates);

} // namespace lyafun
