#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <lyafun/conformal.hpp>
#include <lyafun/error.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace lyafun;

namespace {

//! Toy model with a constant-zero prediction: every training response is 0.
FittedRegression zero_model(const fixture::PairGrids& g)
{
  std::vector<CurvePair> pairs;
  oracle::TestRng rng(1);
  for (int i = 0; i < 3; ++i) {
    pairs.emplace_back(fixture::random_curve(g.x, rng), Curve::constant(g.y, 0.0));
  }
  return FittedRegression(pairs, SemimetricSpec::l2(), 1);
}

ConformalCalibration with_scores(std::vector<double> scores, double alpha)
{
  const fixture::PairGrids g;
  std::vector<std::size_t> cal(scores.size());
  std::iota(cal.begin(), cal.end(), std::size_t{3});
  return ConformalCalibration(zero_model(g), std::move(scores), alpha, 0, {0, 1, 2}, cal);
}

} // namespace

TEST_CASE("conformity score examples")
{
  const fixture::PairGrids g;
  oracle::TestRng rng(2);
  const auto pairs = fixture::random_pairs(6, rng, g);
  const FittedRegression model(pairs, SemimetricSpec::l2(), 2);
  const Curve x = fixture::random_curve(g.x, rng);
  const Curve pred = model.predict(x);
  CHECK(conformity_score(model, x, pred) == 0.0);
  CHECK(conformity_score(model, x, pred + 2.0) == doctest::Approx(-2.0).epsilon(1e-14));
  const Curve y = fixture::random_curve(g.y, rng);
  CHECK(conformity_score(model, x, y) == -sup_distance(y, pred));
  CHECK_THROWS_AS(conformity_score(model, x, Curve::constant(fixture::grid(1050.0, 1185.0, 5), 0.0)),
                  ValidationError);
}

TEST_CASE("rank and quantile examples")
{
  CHECK(conformal_rank(9, 0.1) == 1);
  CHECK(conformal_rank(9, 0.05) == 0);
  CHECK(conformal_rank(4, 0.4) == 2);
  CHECK(conformal_rank(50, 0.1) == 5);
  CHECK(conformal_rank(99, 0.1) == 10);
  CHECK_THROWS_AS(conformal_rank(10, 0.0), ValidationError);
  CHECK_THROWS_AS(conformal_rank(10, 1.0), ValidationError);

  CHECK(with_scores({-1.0, 0.0, -5.0, -3.0}, 0.4).half_width(0.4) == 3.0);
  const auto nine = with_scores({-0.5, -0.1, -0.9, -0.3, -0.2, -0.8, -0.7, -0.4, -0.6}, 0.1);
  CHECK(nine.half_width(0.1) == 0.9);
  CHECK(std::isinf(nine.half_width(0.05)));

  CHECK_THROWS_AS(with_scores({-1.0, 0.5}, 0.1), ValidationError);
  CHECK_THROWS_AS(with_scores({}, 0.1), ValidationError);
}

TEST_CASE("band membership")
{
  const fixture::PairGrids g;
  const auto cal = with_scores({-0.5, -0.1, -0.9, -0.3, -0.2, -0.8, -0.7, -0.4, -0.6}, 0.1);
  oracle::TestRng rng(3);
  const Curve x = fixture::random_curve(g.x, rng);
  const ConformalBand b = band(cal, x);
  CHECK_FALSE(b.degenerate);
  CHECK(b.half_width == 0.9);
  CHECK(contains(b, b.center));
  CHECK(contains(b, b.center + 0.9));
  CHECK_FALSE(contains(b, b.center + 0.9 * 1.01));
  for (std::size_t i = 0; i < b.center.size(); ++i) {
    CHECK(b.upper()[i] - b.lower()[i] == doctest::Approx(1.8));
  }

  const ConformalBand d = band(cal, x, 0.05);
  CHECK(d.degenerate);
  CHECK(std::isinf(d.half_width));
  CHECK(contains(d, b.center + 1e6));
  CHECK_THROWS_AS(d.lower(), ValidationError);
  CHECK_THROWS_AS(d.upper(), ValidationError);
}

TEST_CASE("split sizes and determinism")
{
  const fixture::PairGrids g;
  oracle::TestRng rng(4);
  for (auto [n, n1] : {std::pair<std::size_t, std::size_t>{10, 5}, {7, 3}, {4, 2}, {5, 2}}) {
    const auto pairs = fixture::random_pairs(n, rng, g);
    const auto cal = calibrate(pairs, 0.2, SemimetricSpec::l2(), {}, {1, 2, 3}, 17);
    CHECK(cal.fit_size() == n1);
    CHECK(cal.calibration_size() == n - n1);
    std::set<std::size_t> all(cal.fit_indices().begin(), cal.fit_indices().end());
    all.insert(cal.calibration_indices().begin(), cal.calibration_indices().end());
    CHECK(all.size() == n);

    const auto again = calibrate(pairs, 0.2, SemimetricSpec::l2(), {}, {1, 2, 3}, 17);
    CHECK(again.fit_indices() == cal.fit_indices());
    CHECK(again.scores() == cal.scores());
  }
  const auto three = fixture::random_pairs(3, rng, g);
  CHECK_THROWS_AS(calibrate(three, 0.2, SemimetricSpec::l2(), {}, {1}, 0), ValidationError);
  const auto four = fixture::random_pairs(4, rng, g);
  CHECK_THROWS_AS(calibrate(four, 0.2, SemimetricSpec::l2(), {}, {}, 0), ValidationError);
}

TEST_CASE("split depends on the seed and covers subsets evenly")
{
  const fixture::PairGrids g;
  oracle::TestRng rng(5);
  const auto pairs = fixture::random_pairs(6, rng, g);
  std::vector<int> picked(6, 0);
  std::set<std::vector<std::size_t>> subsets;
  const int runs = 600;
  for (int s = 0; s < runs; ++s) {
    const auto cal = calibrate(pairs, 0.3, SemimetricSpec::l2(), {}, {1, 2}, static_cast<std::uint64_t>(s));
    subsets.insert(cal.fit_indices());
    for (auto i : cal.fit_indices()) {
      ++picked[i];
    }
  }
  CHECK(subsets.size() == 20);
  for (int c : picked) {
    // each index lands in the fitting half with probability 1/2
    CHECK(std::abs(c - runs / 2) < 60);
  }
}

TEST_CASE("calibration scores come from the fitting-half model")
{
  const fixture::PairGrids g;
  oracle::TestRng rng(6);
  const auto pairs = fixture::random_pairs(20, rng, g);
  const auto cal = calibrate(pairs, 0.1, SemimetricSpec::l2(), {}, {1, 3, 5, 7}, 3);
  std::vector<CurvePair> fit;
  for (auto i : cal.fit_indices()) {
    fit.push_back(pairs[i]);
  }
  const auto sel = select_kappa_cv(fit, SemimetricSpec::l2(), {}, {1, 3, 5, 7});
  CHECK(cal.model().kappa() == sel.kappa);
  const FittedRegression model(fit, SemimetricSpec::l2(), sel.kappa);
  for (std::size_t c = 0; c < cal.calibration_size(); ++c) {
    const auto& p = pairs[cal.calibration_indices()[c]];
    CHECK(cal.scores()[c] == -sup_distance(p.response(), model.predict(p.predictor())));
  }
  // candidates beyond the fitting half are dropped
  const auto big = calibrate(pairs, 0.1, SemimetricSpec::l2(), QuadraticKernel{}, {1, 50}, 3);
  CHECK(big.model().kappa() == 1);
}

TEST_CASE("half-width is monotone in alpha and ignores score order")
{
  oracle::TestRng rng(7);
  std::vector<double> scores(40);
  for (auto& s : scores) {
    s = -std::abs(rng.normal());
  }
  const auto cal = with_scores(scores, 0.1);
  double prev = std::numeric_limits<double>::infinity();
  for (double a = 0.01; a < 0.99; a += 0.01) {
    const double h = cal.half_width(a);
    CHECK(h <= prev);
    prev = h;
  }
  auto shuffled = scores;
  std::reverse(shuffled.begin(), shuffled.end());
  std::rotate(shuffled.begin(), shuffled.begin() + 13, shuffled.end());
  const auto perm = with_scores(shuffled, 0.1);
  for (double a : {0.05, 0.1, 0.25, 0.5}) {
    CHECK(perm.half_width(a) == cal.half_width(a));
  }
}

TEST_CASE("coverage on exchangeable synthetic data")
{
  // 200 replications of sample plus one fresh pair; 0.9 nominal
  const fixture::PairGrids g;
  oracle::TestRng rng(8);
  auto draw_pair = [&] {
    const double t = rng.normal();
    std::vector<double> xv, yv;
    for (double l : g.x->points()) {
      xv.push_back(1.0 + t * (l - 1300.0) / 300.0 + 0.05 * rng.normal());
    }
    for (double l : g.y->points()) {
      yv.push_back(1.0 + 0.5 * t + 0.1 * std::sin(l / 10.0) + 0.1 * rng.normal());
    }
    return CurvePair(Curve(g.x, xv), Curve(g.y, yv));
  };
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    std::vector<CurvePair> sample;
    for (int i = 0; i < 40; ++i) {
      sample.push_back(draw_pair());
    }
    const auto cal = calibrate(sample, 0.1, SemimetricSpec::l2(), {}, {2, 4, 8}, static_cast<std::uint64_t>(r));
    const auto fresh = draw_pair();
    covered += contains(band(cal, fresh.predictor()), fresh.response()) ? 1 : 0;
  }
  // binomial(200, 0.9) lies above 0.84 with probability > 0.99
  CHECK(static_cast<double>(covered) / reps >= 0.84);
}
