#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include <lyafun/error.hpp>
#include <lyafun/evaluation.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace lyafun;

namespace {

Curve positive_curve(const GridPtr& g, oracle::TestRng& rng)
{
  std::vector<double> v(g->size());
  for (auto& x : v) {
    x = 0.5 + rng.uniform();
  }
  return Curve(g, v);
}

} // namespace

TEST_CASE("pointwise errors")
{
  const auto g = fixture::grid(1050.0, 1185.0, 20);
  oracle::TestRng rng(1);
  const Curve t = positive_curve(g, rng);
  for (double v : fixture::values(relative_error(t, t))) {
    CHECK(v == 0.0);
  }
  for (double v : fixture::values(relative_error(1.1 * t, t))) {
    CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
  }
  for (double v : fixture::values(plain_error(t, t))) {
    CHECK(v == 0.0);
  }
  for (double v : fixture::values(plain_error(t + 0.2, t))) {
    CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
  }
  for (int r = 0; r < 20; ++r) {
    const Curve p = fixture::random_curve(g, rng);
    const Curve truth = positive_curve(g, rng);
    const Curve e = relative_error(p, truth);
    const Curve u = plain_error(p, truth);
    for (std::size_t k = 0; k < g->size(); ++k) {
      CHECK(std::abs(e[k] * truth[k] - std::abs(u[k])) <= 1e-12);
    }
  }
}

TEST_CASE("non-positive truth is rejected with its wavelengths")
{
  const auto g = fixture::grid(1100.0, 1109.0, 10);
  std::vector<double> v(10, 1.0);
  v[3] = 0.0;
  v[7] = -2.0;
  const Curve bad(g, v);
  try {
    (void)relative_error(Curve::constant(g, 1.0), bad);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    CHECK(what.find("1103") != std::string::npos);
    CHECK(what.find("1107") != std::string::npos);
  }
  CHECK_THROWS_AS(relative_absorption(Curve::constant(g, 1.0), bad), ValidationError);
  CHECK_THROWS_AS(plain_error(Curve::constant(g, 1.0), Curve::constant(fixture::grid(1.0, 2.0, 10), 1.0)),
                  ValidationError);
}

TEST_CASE("relative absorption")
{
  const auto g = fixture::grid(1050.0, 1185.0, 15);
  oracle::TestRng rng(2);
  const Curve c = positive_curve(g, rng);
  for (double v : fixture::values(relative_absorption(c, c))) {
    CHECK(v == 0.0);
  }
  for (double v : fixture::values(relative_absorption(Curve::constant(g, 0.0), c))) {
    CHECK(v == -1.0);
  }
  for (double v : fixture::values(relative_absorption(0.5 * c, c))) {
    CHECK(v == doctest::Approx(-0.5).epsilon(1e-15));
  }
  for (int r = 0; r < 10; ++r) {
    const Curve obs = positive_curve(g, rng) + -0.5;
    std::vector<double> clipped(obs.values().begin(), obs.values().end());
    for (auto& x : clipped) {
      x = std::max(0.0, x);
    }
    for (double v : fixture::values(relative_absorption(Curve(g, clipped), c))) {
      CHECK(v >= -1.0);
    }
  }
}

TEST_CASE("type-8 quantiles")
{
  const std::vector<double> one{3.0};
  CHECK(type8_quantile(one, 0.25) == 3.0);
  const std::vector<double> s{1.0, 2.0, 3.0, 4.0};
  CHECK(type8_quantile(s, 0.5) == doctest::Approx(2.5));
  // h = (4 + 1/3) 0.25 + 1/3 = 1.41667
  CHECK(type8_quantile(s, 0.25) == doctest::Approx(1.0 + (13.0 / 12.0 + 1.0 / 3.0 - 1.0)));
  CHECK(type8_quantile(s, 0.0) == 1.0);
  CHECK(type8_quantile(s, 1.0) == 4.0);
  const std::vector<double> five{1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK(type8_quantile(five, 0.5) == 3.0);
  CHECK_THROWS_AS(type8_quantile(std::vector<double>{}, 0.5), ValidationError);
}

TEST_CASE("summaries")
{
  const auto g = fixture::grid(1050.0, 1185.0, 25);
  oracle::TestRng rng(3);
  const Curve c = fixture::random_curve(g, rng);

  const std::vector<Curve> same(5, c);
  const auto s = summarize(same);
  for (std::size_t k = 0; k < g->size(); ++k) {
    CHECK(s.mean[k] == doctest::Approx(c[k]).epsilon(1e-14));
    CHECK(s.median[k] == c[k]);
    CHECK(s.q1[k] == c[k]);
    CHECK(s.q3[k] == c[k]);
    CHECK(s.ci_upper[k] - s.ci_lower[k] == doctest::Approx(0.0).epsilon(1e-14).scale(1.0));
  }

  const std::vector<Curve> pm{c, -1.0 * c};
  const auto sym = summarize(pm);
  for (std::size_t k = 0; k < g->size(); ++k) {
    CHECK(sym.mean[k] == 0.0);
    CHECK(sym.ci_lower[k] == doctest::Approx(-sym.ci_upper[k]));
  }

  std::vector<Curve> noise;
  for (int i = 0; i < 100; ++i) {
    noise.push_back(fixture::random_curve(g, rng));
  }
  const auto ns = summarize(noise);
  std::size_t small = 0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    small += std::abs(ns.mean[k]) <= 0.3 ? 1 : 0;
    CHECK(ns.q1[k] <= ns.median[k]);
    CHECK(ns.median[k] <= ns.q3[k]);
    // sd of 100 unit normals is about 1, half-width about 0.196
    CHECK(ns.ci_upper[k] - ns.mean[k] == doctest::Approx(0.196).epsilon(0.2));
  }
  CHECK(static_cast<double>(small) >= 0.99 * static_cast<double>(g->size()));
  double avg = 0.0;
  for (double v : ns.mean.values()) {
    avg += v / static_cast<double>(g->size());
  }
  CHECK(ns.overall_mean == doctest::Approx(avg).epsilon(1e-12));

  CHECK_THROWS_AS(summarize(std::vector<Curve>{c}), ValidationError);
  CHECK_THROWS_AS(summarize(std::vector<Curve>{}), ValidationError);
}

TEST_CASE("coverage rate")
{
  const auto g = fixture::grid(1050.0, 1185.0, 10);
  oracle::TestRng rng(4);
  std::vector<ConformalBand> degenerate;
  std::vector<ConformalBand> zero;
  std::vector<Curve> truths;
  for (int i = 0; i < 6; ++i) {
    const Curve center = fixture::random_curve(g, rng);
    degenerate.push_back({center, std::numeric_limits<double>::infinity(), 0.1, true});
    zero.push_back({center, 0.0, 0.1, false});
    truths.push_back(center + 0.5);
  }
  CHECK(coverage_rate(degenerate, truths) == 1.0);
  CHECK(coverage_rate(zero, truths) == 0.0);
  std::vector<ConformalBand> mixed = zero;
  mixed[0].half_width = 0.6;
  mixed[1].half_width = 0.4;
  CHECK(coverage_rate(mixed, truths) == doctest::Approx(1.0 / 6.0));
  truths.pop_back();
  CHECK_THROWS_AS(coverage_rate(zero, truths), ValidationError);
}
