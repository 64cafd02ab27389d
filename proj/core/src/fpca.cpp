#include "lyafun/fpca.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "lyafun/error.hpp"

namespace lyafun {

FpcaModel::FpcaModel(Curve mean, std::vector<Curve> components, std::vector<double> eigenvalues,
                     double total_variance)
  : mean_(std::move(mean))
  , components_(std::move(components))
  , eigenvalues_(std::move(eigenvalues))
  , total_variance_(total_variance)
{
  if (components_.empty() || components_.size() != eigenvalues_.size()) {
    throw ValidationError("fpca model needs matching, non-empty components and eigenvalues");
  }
  for (const auto& c : components_) {
    require_same_grid(mean_, c, "fpca components");
  }
  for (std::size_t j = 1; j < eigenvalues_.size(); ++j) {
    if (eigenvalues_[j] > eigenvalues_[j - 1]) {
      throw ValidationError("fpca eigenvalues must be non-increasing");
    }
  }
}

FpcaModel fit_fpca(std::span<const Curve> curves, std::size_t m)
{
  if (curves.empty()) {
    throw ValidationError("fpca needs at least one curve");
  }
  const auto& grid = curves.front().grid();
  const std::size_t n = curves.size();
  const std::size_t p = grid.size();
  if (m < 1 || m > std::min(n, p)) {
    std::ostringstream msg;
    msg << "fpca: m=" << m << " outside [1, " << std::min(n, p) << "]";
    throw ValidationError(msg.str());
  }
  for (const auto& c : curves) {
    require_same_grid(curves.front(), c, "fpca");
  }

  Eigen::MatrixXd data(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < p; ++k) {
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = curves[i][k];
    }
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;

  const auto w = grid.trapezoid_weights();
  Eigen::VectorXd sqrt_w(p);
  for (std::size_t k = 0; k < p; ++k) {
    sqrt_w(static_cast<Eigen::Index>(k)) = std::sqrt(w[k]);
  }
  // rows scaled by sqrt(w): cov = Z^T Z / n is W^1/2 C W^1/2
  const Eigen::MatrixXd scaled = data * sqrt_w.asDiagonal();
  const Eigen::MatrixXd cov = (scaled.transpose() * scaled) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("fpca eigendecomposition failed");
  }
  const Eigen::VectorXd& values = solver.eigenvalues(); // ascending
  const Eigen::MatrixXd& vectors = solver.eigenvectors();

  std::vector<double> mean_values(p);
  for (std::size_t k = 0; k < p; ++k) {
    mean_values[k] = mean(static_cast<Eigen::Index>(k));
  }
  Curve mean_curve(curves.front().grid_ptr(), std::move(mean_values));

  std::vector<Curve> components;
  std::vector<double> eigenvalues;
  for (std::size_t j = 0; j < m; ++j) {
    const auto col = static_cast<Eigen::Index>(p - 1 - j);
    std::vector<double> phi(p);
    for (std::size_t k = 0; k < p; ++k) {
      phi[k] = vectors(static_cast<Eigen::Index>(k), col) / sqrt_w(static_cast<Eigen::Index>(k));
    }
    for (double v : phi) {
      if (std::abs(v) > 1e-12) {
        if (v < 0.0) {
          for (double& x : phi) {
            x = -x;
          }
        }
        break;
      }
    }
    components.emplace_back(curves.front().grid_ptr(), std::move(phi));
    eigenvalues.push_back(values(col));
  }
  return FpcaModel(std::move(mean_curve), std::move(components), std::move(eigenvalues), cov.trace());
}

std::vector<double> project(const FpcaModel& model, const Curve& curve)
{
  require_same_grid(model.mean(), curve, "fpca project");
  const Curve centered = curve - model.mean();
  std::vector<double> scores;
  scores.reserve(model.size());
  for (const auto& phi : model.components()) {
    scores.push_back(inner_product(centered, phi));
  }
  return scores;
}

Curve reconstruct(const FpcaModel& model, std::span<const double> scores)
{
  if (scores.size() > model.size()) {
    throw ValidationError("more scores than fpca components");
  }
  std::vector<double> out(model.mean().values().begin(), model.mean().values().end());
  for (std::size_t j = 0; j < scores.size(); ++j) {
    const auto phi = model.components()[j].values();
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += scores[j] * phi[k];
    }
  }
  return Curve(model.mean().grid_ptr(), std::move(out));
}

std::vector<double> explained_variance(const FpcaModel& model)
{
  if (!(model.total_variance() > 0.0)) {
    throw ValidationError("explained variance is undefined for a zero-variance sample");
  }
  std::vector<double> out;
  double running = 0.0;
  for (double v : model.eigenvalues()) {
    running += v;
    out.push_back(running / model.total_variance());
  }
  return out;
}

} // namespace lyafun
