#include "lyafun/semimetrics.hpp"

#include <cmath>

#include "lyafun/error.hpp"

namespace lyafun {

SemimetricSpec SemimetricSpec::derivative(int order)
{
  if (order != 1 && order != 2) {
    throw ValidationError("derivative semimetric order must be 1 or 2");
  }
  return SemimetricSpec(Kind::Derivative, order);
}

SemimetricSpec SemimetricSpec::parse(std::string_view name)
{
  if (name == "l2") {
    return l2();
  }
  if (name == "deriv1") {
    return derivative(1);
  }
  if (name == "deriv2") {
    return derivative(2);
  }
  throw ValidationError("unknown semimetric '" + std::string(name) + "' (expected l2, deriv1 or deriv2)");
}

std::string SemimetricSpec::name() const
{
  return kind_ == Kind::L2 ? "l2" : "deriv" + std::to_string(order_);
}

std::vector<double> finite_difference(const WavelengthGrid& grid, std::span<const double> values)
{
  const std::size_t n = grid.size();
  std::vector<double> out(n);
  out[0] = (values[1] - values[0]) / (grid[1] - grid[0]);
  out[n - 1] = (values[n - 1] - values[n - 2]) / (grid[n - 1] - grid[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] = (values[i + 1] - values[i - 1]) / (grid[i + 1] - grid[i - 1]);
  }
  return out;
}

Curve semimetric_features(const SemimetricSpec& spec, const Curve& curve)
{
  if (spec.kind() == SemimetricSpec::Kind::L2) {
    return curve;
  }
  const auto& grid = curve.grid();
  if (grid.size() < static_cast<std::size_t>(spec.order()) + 2) {
    throw ValidationError("grid too short for the requested derivative semimetric");
  }
  std::vector<double> values(curve.values().begin(), curve.values().end());
  for (int k = 0; k < spec.order(); ++k) {
    values = finite_difference(grid, values);
  }
  return Curve(curve.grid_ptr(), std::move(values));
}

double l2_distance(const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "semimetric distance");
  const auto w = a.grid().trapezoid_weights();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += w[i] * d * d;
  }
  return std::sqrt(sum);
}

double distance(const SemimetricSpec& spec, const Curve& a, const Curve& b)
{
  require_same_grid(a, b, "semimetric distance");
  if (spec.kind() == SemimetricSpec::Kind::L2) {
    return l2_distance(a, b);
  }
  return l2_distance(semimetric_features(spec, a), semimetric_features(spec, b));
}

} // namespace lyafun
