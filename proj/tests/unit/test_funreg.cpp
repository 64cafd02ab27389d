#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <lyafun/error.hpp>
#include <lyafun/funreg.hpp>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace lyafun;

namespace {

std::vector<std::vector<double>> rows(const std::vector<CurvePair>& pairs, bool predictors)
{
  std::vector<std::vector<double>> out;
  for (const auto& p : pairs) {
    out.push_back(fixture::values(predictors ? p.predictor() : p.response()));
  }
  return out;
}

//! Predictors offset from `x` by constants, so the L2 distance on a unit
//! length grid equals the offset.
std::vector<CurvePair> offset_pairs(const std::vector<double>& offsets, oracle::TestRng& rng,
                                    const GridPtr& xg, const GridPtr& yg)
{
  std::vector<CurvePair> out;
  for (double d : offsets) {
    out.emplace_back(Curve::constant(xg, d), fixture::random_curve(yg, rng));
  }
  return out;
}

} // namespace

TEST_CASE("kernel shape")
{
  const QuadraticKernel k;
  CHECK(k(0.0) == 1.0);
  CHECK(k(0.5) == 0.75);
  CHECK(k(1.0) == 0.0);
  CHECK(k(1.01) == 0.0);
  CHECK(k(-0.1) == 0.0);
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = k(i / 100.0);
    CHECK(v >= 0.0);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("bandwidth examples")
{
  CHECK(knn_bandwidth(std::vector<double>{1, 2, 3, 4}, 2) == 2.5);
  CHECK(knn_bandwidth(std::vector<double>{4, 3, 1, 2}, 2) == 2.5);
  CHECK(knn_bandwidth(std::vector<double>{1, 1, 1}, 1) == 1.0);
  CHECK(knn_bandwidth(std::vector<double>{0, 5}, 1) == 2.5);
  CHECK_THROWS_AS(knn_bandwidth(std::vector<double>{1, 2}, 2), ValidationError);
  CHECK_THROWS_AS(knn_bandwidth(std::vector<double>{1, 2}, 0), ValidationError);
}

TEST_CASE("exactly kappa curves fall inside the bandwidth without ties")
{
  oracle::TestRng rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> d(12);
    for (auto& v : d) {
      v = rng.uniform();
    }
    for (std::size_t kappa = 1; kappa < d.size(); ++kappa) {
      const double h = knn_bandwidth(d, kappa);
      CHECK(std::count_if(d.begin(), d.end(), [&](double v) { return v <= h; }) == static_cast<long>(kappa));
    }
  }
}

TEST_CASE("five-pair example")
{
  const std::vector<double> d{0.1, 0.2, 0.3, 0.9, 1.4};
  const auto w = kernel_weights(d, 3);
  const double raw[3] = {1.0 - 1.0 / 36.0, 1.0 - 1.0 / 9.0, 0.75};
  const double total = raw[0] + raw[1] + raw[2];
  for (int i = 0; i < 3; ++i) {
    CHECK(w[static_cast<std::size_t>(i)] == doctest::Approx(raw[i] / total).epsilon(1e-14));
  }
  CHECK(w[3] == 0.0);
  CHECK(w[4] == 0.0);

  oracle::TestRng rng(2);
  const auto xg = fixture::grid(1300.0, 1301.0, 2);
  const auto yg = fixture::grid(1050.0, 1185.0, 17);
  const auto pairs = offset_pairs(d, rng, xg, yg);
  const FittedRegression model(pairs, SemimetricSpec::l2(), 3);
  const Curve x = Curve::constant(xg, 0.0);
  CHECK(model.bandwidth(x) == doctest::Approx(0.6).epsilon(1e-14));
  const Curve pred = model.predict(x);
  for (std::size_t p = 0; p < pred.size(); ++p) {
    double expect = 0.0;
    for (int i = 0; i < 3; ++i) {
      expect += raw[i] / total * pairs[static_cast<std::size_t>(i)].response()[p];
    }
    CHECK(std::abs(pred[p] - expect) <= 1e-12);
  }
}

TEST_CASE("prediction examples")
{
  oracle::TestRng rng(3);
  const auto xg = fixture::grid(1300.0, 1301.0, 2);
  const auto yg = fixture::grid(1050.0, 1185.0, 9);

  SUBCASE("isolated training point is interpolated")
  {
    const auto pairs = offset_pairs({0.0, 10.0, 11.0, 12.0}, rng, xg, yg);
    const FittedRegression model(pairs, SemimetricSpec::l2(), 1);
    const Curve pred = model.predict(Curve::constant(xg, 0.0));
    for (std::size_t p = 0; p < pred.size(); ++p) {
      CHECK(pred[p] == pairs[0].response()[p]);
    }
  }
  SUBCASE("equidistant pairs are averaged")
  {
    const auto pairs = offset_pairs({-1.0, 1.0, 5.0}, rng, xg, yg);
    const FittedRegression model(pairs, SemimetricSpec::l2(), 2);
    const Curve pred = model.predict(Curve::constant(xg, 0.0));
    for (std::size_t p = 0; p < pred.size(); ++p) {
      CHECK(pred[p] == doctest::Approx(0.5 * (pairs[0].response()[p] + pairs[1].response()[p])).epsilon(1e-14));
    }
  }
  SUBCASE("constant responses give a constant prediction")
  {
    std::vector<CurvePair> pairs;
    for (int i = 0; i < 6; ++i) {
      pairs.emplace_back(fixture::random_curve(xg, rng), Curve::constant(yg, 2.25));
    }
    const FittedRegression model(pairs, SemimetricSpec::l2(), 3);
    for (double v : fixture::values(model.predict(fixture::random_curve(xg, rng)))) {
      CHECK(v == doctest::Approx(2.25).epsilon(1e-15));
    }
  }
  SUBCASE("all weights zero falls back to the kappa nearest")
  {
    const auto w = kernel_weights(std::vector<double>{1.0, 1.0, 1.0}, 1);
    CHECK(w == std::vector<double>{1.0, 0.0, 0.0});
    const auto w2 = kernel_weights(std::vector<double>{3.0, 2.0, 2.0, 2.0, 1.0}, 2);
    CHECK(w2[4] > 0.0);
    CHECK(std::accumulate(w2.begin(), w2.end(), 0.0) == doctest::Approx(1.0));
  }
  SUBCASE("duplicate predictors share the top weight")
  {
    const auto w = kernel_weights(std::vector<double>{0.0, 0.0, 0.5, 3.0}, 2);
    CHECK(w[0] == w[1]);
    CHECK(w[2] == 0.0);
  }
}

TEST_CASE("construction checks")
{
  oracle::TestRng rng(4);
  auto pairs = fixture::random_pairs(4, rng);
  CHECK_THROWS_AS(FittedRegression(pairs, SemimetricSpec::l2(), 4), ValidationError);
  CHECK_THROWS_AS(FittedRegression(pairs, SemimetricSpec::l2(), 0), ValidationError);
  CHECK_THROWS_AS(FittedRegression({pairs[0]}, SemimetricSpec::l2(), 1), ValidationError);
  pairs.emplace_back(Curve::constant(fixture::grid(1300.0, 1600.0, 30), 1.0),
                     Curve::constant(fixture::grid(1050.0, 1185.0, 21), 1.0));
  CHECK_THROWS_AS(FittedRegression(pairs, SemimetricSpec::l2(), 2), ValidationError);
}

TEST_CASE("estimator invariants on random data")
{
  oracle::TestRng rng(5);
  const fixture::PairGrids grids;
  for (int t = 0; t < 30; ++t) {
    const auto pairs = fixture::random_pairs(12, rng, grids);
    const std::size_t kappa = 1 + static_cast<std::size_t>(rng.uniform() * 11.0);
    const FittedRegression model(pairs, SemimetricSpec::l2(), kappa);
    const Curve x = fixture::random_curve(grids.x, rng);

    const auto w = model.weights(x);
    const auto d = model.distances(x);
    const double h = model.bandwidth(x);
    CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(w[i] >= 0.0);
      if (d[i] >= h) {
        CHECK(w[i] == 0.0);
      }
    }

    const Curve pred = model.predict(x);
    for (std::size_t p = 0; p < pred.size(); ++p) {
      double lo = pairs[0].response()[p];
      double hi = lo;
      for (const auto& pr : pairs) {
        lo = std::min(lo, pr.response()[p]);
        hi = std::max(hi, pr.response()[p]);
      }
      CHECK(pred[p] >= lo - 1e-12);
      CHECK(pred[p] <= hi + 1e-12);
    }

    std::vector<CurvePair> scaled_y;
    std::vector<CurvePair> scaled_x;
    for (const auto& pr : pairs) {
      scaled_y.emplace_back(pr.predictor(), 4.0 * pr.response());
      scaled_x.emplace_back(3.0 * pr.predictor(), pr.response());
    }
    const Curve py = FittedRegression(scaled_y, SemimetricSpec::l2(), kappa).predict(x);
    const Curve px = FittedRegression(scaled_x, SemimetricSpec::l2(), kappa).predict(3.0 * x);
    for (std::size_t p = 0; p < pred.size(); ++p) {
      CHECK(py[p] == 4.0 * pred[p]);
      CHECK(std::abs(px[p] - pred[p]) <= 1e-12);
    }

    const auto ref = oracle::nadaraya_watson(
      [&] {
        std::vector<double> od;
        for (const auto& pr : pairs) {
          od.push_back(oracle::l2_distance(fixture::points(*grids.x), fixture::values(pr.predictor()), fixture::values(x)));
        }
        return od;
      }(),
      rows(pairs, false), kappa);
    for (std::size_t p = 0; p < pred.size(); ++p) {
      CHECK(std::abs(pred[p] - ref[p]) <= 1e-12);
    }
  }
}

TEST_CASE("derivative semimetric ignores predictor offsets")
{
  oracle::TestRng rng(6);
  const fixture::PairGrids grids;
  const auto pairs = fixture::random_pairs(8, rng, grids);
  const FittedRegression model(pairs, SemimetricSpec::derivative(1), 3);
  const Curve x = fixture::random_curve(grids.x, rng);
  const Curve a = model.predict(x);
  const Curve b = model.predict(x + 5.0);
  for (std::size_t p = 0; p < a.size(); ++p) {
    CHECK(a[p] == doctest::Approx(b[p]).epsilon(1e-9));
  }
}

TEST_CASE("leave-one-out scores match the oracle table")
{
  oracle::TestRng rng(7);
  const fixture::PairGrids grids;
  const auto pairs = fixture::random_pairs(15, rng, grids);
  const std::vector<std::size_t> cands{1, 2, 3, 5, 8, 14};
  const auto sel = select_kappa_cv(pairs, SemimetricSpec::l2(), {}, cands);
  const auto ref = oracle::loo_scores(fixture::points(*grids.x), rows(pairs, true), fixture::points(*grids.y),
                                      rows(pairs, false), cands);
  REQUIRE(sel.scores.size() == ref.size());
  for (std::size_t c = 0; c < ref.size(); ++c) {
    CHECK(sel.scores[c] == doctest::Approx(ref[c]).epsilon(1e-10));
  }
  const auto best = std::min_element(ref.begin(), ref.end()) - ref.begin();
  CHECK(sel.kappa == cands[static_cast<std::size_t>(best)]);
}

TEST_CASE("leave-one-out picks one neighbor on a smooth one-parameter family")
{
  const fixture::PairGrids grids;
  oracle::TestRng rng(8);
  const std::size_t n = 20;
  std::vector<CurvePair> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 4.0 * rng.uniform();
    std::vector<double> xv, yv;
    for (double l : grids.x->points()) {
      xv.push_back(t * std::sin(l / 40.0) + t * t);
    }
    for (double l : grids.y->points()) {
      yv.push_back(t * std::sin(l / 40.0) + t * t + 0.5);
    }
    pairs.emplace_back(Curve(grids.x, xv), Curve(grids.y, yv));
  }
  const std::vector<std::size_t> cands{1, n - 1};
  const auto sel = select_kappa_cv(pairs, SemimetricSpec::l2(), {}, cands);
  const auto ref = oracle::loo_scores(fixture::points(*grids.x), rows(pairs, true), fixture::points(*grids.y),
                                      rows(pairs, false), cands);
  CHECK(ref[0] < ref[1]);
  CHECK(sel.kappa == 1);
}

TEST_CASE("leave-one-out averages pure noise")
{
  const fixture::PairGrids grids;
  const std::size_t n = 15;
  int agree = 0;
  int wide = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    oracle::TestRng rng(1000 + seed);
    const auto pairs = fixture::random_pairs(n, rng, grids);
    const std::vector<std::size_t> cands{1, n - 1};
    const auto sel = select_kappa_cv(pairs, SemimetricSpec::l2(), {}, cands);
    const auto ref = oracle::loo_scores(fixture::points(*grids.x), rows(pairs, true), fixture::points(*grids.y),
                                        rows(pairs, false), cands);
    agree += (sel.kappa == (ref[0] <= ref[1] ? cands[0] : cands[1])) ? 1 : 0;
    wide += sel.kappa == n - 1 ? 1 : 0;
  }
  CHECK(agree == 20);
  CHECK(wide > 10);
}

TEST_CASE("kappa selection edge cases")
{
  oracle::TestRng rng(9);
  const auto pairs = fixture::random_pairs(6, rng);
  CHECK(select_kappa_cv(pairs, SemimetricSpec::l2(), {}, {3}).kappa == 3);
  CHECK_THROWS_AS(select_kappa_cv(pairs, SemimetricSpec::l2(), {}, {}), ValidationError);
  CHECK_THROWS_AS(select_kappa_cv(pairs, SemimetricSpec::l2(), {}, {6}), ValidationError);
  const std::vector<CurvePair> two(pairs.begin(), pairs.begin() + 2);
  CHECK_THROWS_AS(select_kappa_cv(two, SemimetricSpec::l2(), {}, {1}), ValidationError);

  // identical pairs tie on every candidate; the smaller kappa wins
  std::vector<CurvePair> same(5, pairs[0]);
  CHECK(select_kappa_cv(same, SemimetricSpec::l2(), {}, {4, 2, 3}).kappa == 2);
}
