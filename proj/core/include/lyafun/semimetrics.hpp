#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lyafun/curves.hpp"

namespace lyafun {

//! L2 metric, or a Sobolev-type semimetric comparing the first or second
//! derivatives of the curves.
class SemimetricSpec {
public:
  enum class Kind { L2, Derivative };

  static SemimetricSpec l2() { return SemimetricSpec(Kind::L2, 0); }
  static SemimetricSpec derivative(int order);
  //! Parses "l2", "deriv1" or "deriv2".
  static SemimetricSpec parse(std::string_view name);

  Kind kind() const { return kind_; }
  int order() const { return order_; }
  std::string name() const;

  friend bool operator==(const SemimetricSpec&, const SemimetricSpec&) = default;

private:
  SemimetricSpec(Kind kind, int order)
    : kind_(kind)
    , order_(order)
  {
  }

  Kind kind_;
  int order_;
};

//! First derivative by finite differences: central in the interior,
//! one-sided at the two ends. Works on non-uniform grids.
std::vector<double> finite_difference(const WavelengthGrid& grid, std::span<const double> values);

//! The curve the semimetric compares in L2: the curve itself for L2, its
//! order-th finite-difference derivative otherwise.
Curve semimetric_features(const SemimetricSpec& spec, const Curve& curve);

//! sqrt of the trapezoid integral of (a - b)^2.
double l2_distance(const Curve& a, const Curve& b);

double distance(const SemimetricSpec& spec, const Curve& a, const Curve& b);

} // namespace lyafun
