#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lyafun/curves.hpp"

namespace lyafun {

//! Mean curve plus the leading L2-orthonormal principal components of a
//! curve sample. Eigenvalues use the 1/n covariance.
class FpcaModel {
public:
  FpcaModel(Curve mean, std::vector<Curve> components, std::vector<double> eigenvalues, double total_variance);

  const Curve& mean() const { return mean_; }
  const std::vector<Curve>& components() const { return components_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  //! Sum of all covariance eigenvalues, retained or not.
  double total_variance() const { return total_variance_; }
  std::size_t size() const { return components_.size(); }
  const WavelengthGrid& grid() const { return mean_.grid(); }

private:
  Curve mean_;
  std::vector<Curve> components_;
  std::vector<double> eigenvalues_;
  double total_variance_;
};

//! Quadrature-weighted PCA: eigendecomposition of W^1/2 C W^1/2 with the
//! trapezoid weights W, so the retained components are orthonormal under the
//! trapezoid inner product. Component signs are fixed so the first value with
//! magnitude above 1e-12 is positive.
FpcaModel fit_fpca(std::span<const Curve> curves, std::size_t m);

//! Trapezoid inner products of (curve - mean) with each component.
std::vector<double> project(const FpcaModel& model, const Curve& curve);

//! mean + sum_j scores[j] * component_j.
Curve reconstruct(const FpcaModel& model, std::span<const double> scores);

//! Cumulative eigenvalue fractions of the total variance.
std::vector<double> explained_variance(const FpcaModel& model);

} // namespace lyafun
