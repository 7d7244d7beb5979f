#include <doctest.h>

#include <cmath>
#include <random>

#include "dclass/error.hpp"
#include "dclass/mvv.hpp"
#include "test_support.hpp"

using namespace dclass;
using dclass::testing::grid_histogram;
using dclass::testing::make_histogram;

TEST_CASE("interval reductions") {
  const auto v = Interval::make(2.0, 6.0);
  CHECK(reduce_interval(v, IntervalReduction::Mean) == 4.0);
  CHECK(reduce_interval(v, IntervalReduction::Lower) == 2.0);
  CHECK(reduce_interval(Interval::make(0.20, 0.23), IntervalReduction::Upper) == 0.23);
}

TEST_CASE("interval validation") {
  CHECK_THROWS_WITH_AS(Interval::make(2.0, 1.0), doctest::Contains("interval lower exceeds upper"),
                       DataError);
  CHECK_THROWS_AS(Interval::make(0.0, INFINITY), DataError);
  CHECK_NOTHROW(Interval::make(1.0, 1.0));
}

TEST_CASE("histogram reductions") {
  const auto two = make_histogram({{0, 2}, {2, 4}}, {0.5, 0.5});
  // Weighted-midpoint oracle: 0.5*1 + 0.5*3.
  CHECK(reduce_histogram(two, HistogramReduction::Mean) == doctest::Approx(2.0));
  CHECK(reduce_histogram(two, HistogramReduction::Median) == doctest::Approx(2.0));
  CHECK(reduce_histogram(make_histogram({{0, 1}}, {1.0}), HistogramReduction::Mean) == 0.5);

  // Median inside a bin: cumulative 0.2 after [0,1), needs 0.3 of the 0.6 in [1,2).
  const auto skewed = make_histogram({{0, 1}, {1, 2}, {2, 3}}, {0.2, 0.6, 0.2});
  CHECK(reduce_histogram(skewed, HistogramReduction::Median) == doctest::Approx(1.5));
  const auto gap = make_histogram({{0, 1}, {1, 2}, {2, 3}}, {0.1, 0.0, 0.9});
  CHECK(reduce_histogram(gap, HistogramReduction::Median) == doctest::Approx(2.0 + 0.4 / 0.9));
}

TEST_CASE("ecdf evaluation") {
  const auto two = make_histogram({{0, 2}, {2, 4}}, {0.5, 0.5});
  CHECK(ecdf_eval(two, -1.0) == 0.0);
  CHECK(ecdf_eval(two, 4.0) == 1.0);
  CHECK(ecdf_eval(two, 10.0) == 1.0);
  CHECK(ecdf_eval(two, 1.0) == doctest::Approx(0.25));
  CHECK(ecdf_eval(two, 2.0) == doctest::Approx(0.5));
  CHECK(ecdf_eval(two, 3.0) == doctest::Approx(0.75));
}

TEST_CASE("histogram invariants are enforced") {
  CHECK_THROWS_AS(make_histogram({}, {}), DataError);
  CHECK_THROWS_AS(make_histogram({{0, 1}, {1.5, 2}}, {0.5, 0.5}), DataError);
  CHECK_THROWS_AS(make_histogram({{0, 1}, {1, 1}}, {0.5, 0.5}), DataError);
  CHECK_THROWS_AS(make_histogram({{0, 1}, {1, 2}}, {1.2, -0.2}), DataError);
  CHECK_THROWS_WITH_AS(make_histogram({{0, 1}, {1, 2}}, {0.5, 0.6}), doctest::Contains("sum"),
                       DataError);
  CHECK_THROWS_AS(make_histogram({{0, 1}}, {0.5, 0.5}), DataError);

  // Float noise within 1e-6 is renormalized.
  const auto noisy = make_histogram({{0, 1}, {1, 2}}, {0.5, 0.5 + 5e-7});
  CHECK(std::abs(noisy.freqs()[0] + noisy.freqs()[1] - 1.0) < 1e-12);
}

TEST_CASE("summary moments of a symmetric histogram") {
  const auto two = make_histogram({{0, 2}, {2, 4}}, {0.5, 0.5});
  const auto s = summarize(two);
  CHECK(s.min == 0.0);
  CHECK(s.max == 4.0);
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.sd == doctest::Approx(1.0));
  CHECK(s.skewness == doctest::Approx(0.0));
  CHECK(s.kurtosis == doctest::Approx(1.0));
}

TEST_CASE("property: mean is invariant under bin subdivision") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = dclass::testing::random_histogram(rng);
    std::vector<Interval> bins;
    std::vector<double> freqs;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const auto& b = h.bins()[k];
      const double mid = b.midpoint();
      bins.push_back({b.lower, mid});
      bins.push_back({mid, b.upper});
      freqs.push_back(h.freqs()[k] / 2);
      freqs.push_back(h.freqs()[k] / 2);
    }
    const Histogram split(std::move(bins), std::move(freqs));
    CHECK(std::abs(reduce_histogram(h, HistogramReduction::Mean) -
                   reduce_histogram(split, HistogramReduction::Mean)) < 1e-9);
  }
}

TEST_CASE("property: ecdf is monotone and reaches one") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = dclass::testing::random_histogram(rng);
    const double lo = h.support_lower() - 1.0, hi = h.support_upper() + 1.0;
    double previous = 0.0;
    for (int k = 0; k <= 100; ++k) {
      const double u = lo + (hi - lo) * k / 100.0;
      const double f = ecdf_eval(h, u);
      CHECK(f >= previous - 1e-15);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
      previous = f;
    }
    CHECK(ecdf_eval(h, h.support_upper()) == 1.0);
    // The median sits where the ECDF first reaches one half.
    CHECK(ecdf_eval(h, reduce_histogram(h, HistogramReduction::Median)) == doctest::Approx(0.5));
  }
}

TEST_CASE("property: interval mean lies inside the interval") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(-100.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    double a = unit(rng), b = unit(rng);
    const auto v = Interval::make(std::min(a, b), std::max(a, b));
    const double m = reduce_interval(v, IntervalReduction::Mean);
    CHECK(m >= v.lower);
    CHECK(m <= v.upper);
  }
}

TEST_CASE("dataset validation catches mixed kinds") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"x", ColumnKind::Point}};
  d.cells = {{1.0, Interval{0.0, 1.0}}};
  d.response = {0, 1};
  CHECK_THROWS_WITH_AS(d.validate(), doctest::Contains("mixes cell kinds"), DataError);
  d.cells = {{1.0, 2.0}};
  CHECK_NOTHROW(d.validate());
  d.response = {0, 2};
  CHECK_THROWS_AS(d.validate(), DataError);
}

TEST_CASE("subset repeats rows") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"x", ColumnKind::Point}};
  d.cells = {{1.0, 2.0, 3.0}};
  d.response = {0, 1, 0};
  const std::vector<std::size_t> rows{2, 2, 1};
  const auto s = d.subset(rows);
  CHECK(s.n_objects() == 3);
  CHECK(std::get<double>(s.at(0, 0)) == 3.0);
  CHECK(s.response == std::vector<int>{0, 0, 1});
}
