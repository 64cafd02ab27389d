#include "lyafun/funreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "lyafun/error.hpp"

namespace lyafun {

namespace {

std::vector<double> sorted_copy(std::span<const double> values)
{
  std::vector<double> out(values.begin(), values.end());
  std::sort(out.begin(), out.end());
  return out;
}

double bandwidth_from_sorted(const std::vector<double>& sorted, std::size_t kappa)
{
  if (kappa == sorted.size()) {
    return 1.5 * sorted.back();
  }
  const double inner = sorted[kappa - 1];
  const double outer = sorted[kappa];
  return inner == outer ? inner : 0.5 * (inner + outer);
}

void check_kappa(std::size_t kappa, std::size_t n, std::size_t max_kappa)
{
  if (kappa < 1 || kappa > max_kappa) {
    std::ostringstream msg;
    msg << "neighbor count kappa=" << kappa << " outside [1, " << max_kappa << "] for " << n << " curves";
    throw ValidationError(msg.str());
  }
}

std::vector<double> weights_with_bandwidth(std::span<const double> distances, std::size_t kappa, double h,
                                           const QuadraticKernel& kernel)
{
  const std::size_t n = distances.size();
  std::vector<double> w(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = distances[i];
    const double u = d == 0.0 ? 0.0 : (h > 0.0 ? d / h : std::numeric_limits<double>::infinity());
    w[i] = kernel(u);
    total += w[i];
  }
  if (total > 0.0) {
    for (double& v : w) {
      v /= total;
    }
    return w;
  }
  // every kernel weight vanished: equal weights on the kappa nearest
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return distances[a] < distances[b];
  });
  std::fill(w.begin(), w.end(), 0.0);
  for (std::size_t k = 0; k < kappa; ++k) {
    w[order[k]] = 1.0 / static_cast<double>(kappa);
  }
  return w;
}

} // namespace

double knn_bandwidth(std::span<const double> distances, std::size_t kappa)
{
  check_kappa(kappa, distances.size(), distances.empty() ? 0 : distances.size() - 1);
  return bandwidth_from_sorted(sorted_copy(distances), kappa);
}

std::vector<double> kernel_weights(std::span<const double> distances, std::size_t kappa,
                                   const QuadraticKernel& kernel)
{
  check_kappa(kappa, distances.size(), distances.size());
  const double h = bandwidth_from_sorted(sorted_copy(distances), kappa);
  return weights_with_bandwidth(distances, kappa, h, kernel);
}

FittedRegression::FittedRegression(std::vector<CurvePair> pairs, SemimetricSpec semimetric, std::size_t kappa,
                                   QuadraticKernel kernel)
  : pairs_(std::move(pairs))
  , semimetric_(semimetric)
  , kappa_(kappa)
  , kernel_(kernel)
{
  if (pairs_.size() < 2) {
    throw ValidationError("regression needs at least 2 training pairs");
  }
  check_kappa(kappa_, pairs_.size(), pairs_.size() - 1);
  const auto& first = pairs_.front();
  for (std::size_t i = 1; i < pairs_.size(); ++i) {
    require_same_grid(first.predictor(), pairs_[i].predictor(), "training predictors");
    require_same_grid(first.response(), pairs_[i].response(), "training responses");
  }
  features_.reserve(pairs_.size());
  for (const auto& p : pairs_) {
    features_.push_back(semimetric_features(semimetric_, p.predictor()));
  }
}

std::vector<double> FittedRegression::distances(const Curve& x) const
{
  require_same_grid(pairs_.front().predictor(), x, "predict");
  const Curve fx = semimetric_features(semimetric_, x);
  std::vector<double> d(features_.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = l2_distance(features_[i], fx);
  }
  return d;
}

double FittedRegression::bandwidth(const Curve& x) const
{
  return knn_bandwidth(distances(x), kappa_);
}

std::vector<double> FittedRegression::weights(const Curve& x) const
{
  return kernel_weights(distances(x), kappa_, kernel_);
}

Curve FittedRegression::combine(std::span<const double> weights, std::span<const Curve> responses) const
{
  if (weights.size() != responses.size() || responses.empty()) {
    throw ValidationError("combine: weights and responses must have equal, non-zero length");
  }
  const std::size_t m = responses.front().size();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    if (weights[i] == 0.0) {
      continue;
    }
    const auto y = responses[i].values();
    for (std::size_t k = 0; k < m; ++k) {
      out[k] += weights[i] * y[k];
    }
  }
  return Curve(responses.front().grid_ptr(), std::move(out));
}

Curve FittedRegression::predict(const Curve& x) const
{
  const auto w = weights(x);
  const std::size_t m = response_grid().size();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < pairs_.size(); ++i) {
    if (w[i] == 0.0) {
      continue;
    }
    const auto y = pairs_[i].response().values();
    for (std::size_t k = 0; k < m; ++k) {
      out[k] += w[i] * y[k];
    }
  }
  return Curve(response_grid_ptr(), std::move(out));
}

KappaSelection select_kappa_cv(std::span<const CurvePair> pairs, const SemimetricSpec& semimetric,
                               const QuadraticKernel& kernel, std::vector<std::size_t> candidates)
{
  const std::size_t n = pairs.size();
  if (candidates.empty()) {
    throw ValidationError("kappa cross-validation needs at least one candidate");
  }
  if (n < 3) {
    throw ValidationError("kappa cross-validation needs at least 3 pairs");
  }
  for (std::size_t k : candidates) {
    check_kappa(k, n, n - 1);
  }
  for (std::size_t i = 1; i < n; ++i) {
    require_same_grid(pairs[0].predictor(), pairs[i].predictor(), "training predictors");
    require_same_grid(pairs[0].response(), pairs[i].response(), "training responses");
  }

  std::vector<Curve> features;
  features.reserve(n);
  for (const auto& p : pairs) {
    features.push_back(semimetric_features(semimetric, p.predictor()));
  }
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dist[i * n + j] = dist[j * n + i] = l2_distance(features[i], features[j]);
    }
  }

  const auto& rgrid = pairs[0].response().grid();
  const auto rw = rgrid.trapezoid_weights();
  const std::size_t m = rgrid.size();

  KappaSelection out;
  out.candidates = candidates;
  out.scores.assign(candidates.size(), 0.0);
  std::vector<double> others(n - 1);
  std::vector<double> prediction(m);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0, k = 0; j < n; ++j) {
      if (j != i) {
        others[k++] = dist[i * n + j];
      }
    }
    const auto sorted = sorted_copy(others);
    const auto target = pairs[i].response().values();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const double h = bandwidth_from_sorted(sorted, candidates[c]);
      const auto w = weights_with_bandwidth(others, candidates[c], h, kernel);
      std::fill(prediction.begin(), prediction.end(), 0.0);
      for (std::size_t j = 0, k = 0; j < n; ++j) {
        if (j == i) {
          continue;
        }
        const double wk = w[k++];
        if (wk == 0.0) {
          continue;
        }
        const auto y = pairs[j].response().values();
        for (std::size_t p = 0; p < m; ++p) {
          prediction[p] += wk * y[p];
        }
      }
      double err = 0.0;
      for (std::size_t p = 0; p < m; ++p) {
        const double d = prediction[p] - target[p];
        err += rw[p] * d * d;
      }
      out.scores[c] += err;
    }
  }
  for (double& s : out.scores) {
    s /= static_cast<double>(n);
  }

  std::size_t best = 0;
  for (std::size_t c = 1; c < candidates.size(); ++c) {
    if (out.scores[c] < out.scores[best] ||
        (out.scores[c] == out.scores[best] && candidates[c] < candidates[best])) {
      best = c;
    }
  }
  out.kappa = candidates[best];
  return out;
}

} // namespace lyafun
