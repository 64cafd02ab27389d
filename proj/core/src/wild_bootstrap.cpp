#include "lyafun/wild_bootstrap.hpp"

#include <algorithm>
#include <sstream>

#include "lyafun/error.hpp"
#include "lyafun/random.hpp"

namespace lyafun {

namespace {

double draw_v(Rng& rng)
{
  return rng.uniform() < golden_v::low_probability ? golden_v::low : golden_v::high;
}

} // namespace

void WildBootstrapConfig::validate() const
{
  if (replicates < 1) {
    throw ValidationError("wild bootstrap needs at least one replicate");
  }
  if (components < 1) {
    throw ValidationError("wild bootstrap needs at least one component");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
  const double tail = alpha / (2.0 * static_cast<double>(components));
  if (static_cast<double>(replicates) * tail < 1.0) {
    std::ostringstream msg;
    msg << "B=" << replicates << " replicates cannot resolve the " << tail << " quantile; use B >= "
        << static_cast<std::size_t>(std::ceil(1.0 / tail));
    throw ValidationError(msg.str());
  }
}

std::vector<double> sample_v(std::size_t count, std::uint64_t seed)
{
  Rng rng(seed);
  std::vector<double> out(count);
  for (double& v : out) {
    v = draw_v(rng);
  }
  return out;
}

ReplicateDraws draw_replicate(std::uint64_t seed, std::size_t replicate, std::size_t n)
{
  Rng rng(derive_seed(seed, replicate));
  ReplicateDraws out;
  out.residual_index.resize(n);
  out.multiplier.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.residual_index[i] = rng.index(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.multiplier[i] = draw_v(rng);
  }
  return out;
}

double nearest_rank_quantile(std::vector<double> values, double level)
{
  if (values.empty()) {
    throw ValidationError("quantile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const double rank = std::ceil(level * static_cast<double>(values.size()) - 1e-9);
  const auto k = static_cast<std::size_t>(std::clamp(rank, 1.0, static_cast<double>(values.size())));
  return values[k - 1];
}

BootstrapBand bootstrap_bands(std::span<const CurvePair> sample, const FittedRegression& model, const Curve& x,
                              const FpcaModel& fpca, const WildBootstrapConfig& config)
{
  config.validate();
  const std::size_t n = sample.size();
  const std::size_t m = config.components;
  if (n != model.size()) {
    throw ValidationError("wild bootstrap: sample size differs from the fitted model");
  }
  if (m > fpca.size()) {
    std::ostringstream msg;
    msg << "wild bootstrap asks for " << m << " components; fpca model has " << fpca.size();
    throw ValidationError(msg.str());
  }
  require_same_grid(model.pairs().front().response(), fpca.mean(), "wild bootstrap");

  std::vector<Curve> fitted;
  std::vector<Curve> residuals;
  fitted.reserve(n);
  residuals.reserve(n);
  for (const auto& pair : sample) {
    fitted.push_back(model.predict(pair.predictor()));
    residuals.push_back(pair.response() - fitted.back());
  }
  const auto weights = model.weights(x);
  // replicate responses are centered on the fitted values, so the bootstrap
  // estimates scatter around sum_i w_i r(X_i)
  const Curve base = model.combine(weights, fitted);
  const Curve estimate = model.predict(x);

  // r_b(x) = sum_i w_i (fit_i + e_{I_i} V_i); only the residual term varies
  std::vector<std::vector<double>> coefficients(m, std::vector<double>(config.replicates));
  const std::size_t p = base.size();
  for (std::size_t b = 0; b < config.replicates; ++b) {
    const auto draws = draw_replicate(config.seed, b, n);
    std::vector<double> values(base.values().begin(), base.values().end());
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] == 0.0) {
        continue;
      }
      const double scale = weights[i] * draws.multiplier[i];
      const auto e = residuals[draws.residual_index[i]].values();
      for (std::size_t k = 0; k < p; ++k) {
        values[k] += scale * e[k];
      }
    }
    const auto scores = project(fpca, Curve(base.grid_ptr(), std::move(values)));
    for (std::size_t j = 0; j < m; ++j) {
      coefficients[j][b] = scores[j];
    }
  }

  BootstrapBand out{{}, {}, estimate, estimate, estimate, config.alpha, config.replicates};
  const double tail = config.alpha / (2.0 * static_cast<double>(m));
  for (std::size_t j = 0; j < m; ++j) {
    out.intervals.push_back({nearest_rank_quantile(coefficients[j], tail),
                             nearest_rank_quantile(coefficients[j], 1.0 - tail)});
  }
  auto point = project(fpca, estimate);
  point.resize(m);
  out.point_coefficients = point;
  out.center = reconstruct(fpca, point);

  std::vector<double> lo(fpca.mean().values().begin(), fpca.mean().values().end());
  std::vector<double> hi = lo;
  for (std::size_t j = 0; j < m; ++j) {
    const auto phi = fpca.components()[j].values();
    const auto [a_lo, a_hi] = out.intervals[j];
    for (std::size_t k = 0; k < p; ++k) {
      if (phi[k] >= 0.0) {
        lo[k] += a_lo * phi[k];
        hi[k] += a_hi * phi[k];
      } else {
        lo[k] += a_hi * phi[k];
        hi[k] += a_lo * phi[k];
      }
    }
  }
  out.lower = Curve(estimate.grid_ptr(), std::move(lo));
  out.upper = Curve(estimate.grid_ptr(), std::move(hi));
  return out;
}

} // namespace lyafun
