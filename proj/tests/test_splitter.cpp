#include <doctest.h>

#include <numeric>
#include <random>

#include "dclass/error.hpp"
#include "dclass/splitter.hpp"
#include "dclass/synthgen.hpp"
#include "test_support.hpp"

using namespace dclass;
using dclass::testing::histogram_with_midpoints;

namespace {

std::vector<std::size_t> all_rows(const Dataset& d) {
  std::vector<std::size_t> rows(d.n_objects());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

// Exhaustive oracle: score every enumerated candidate through the generic
// router and keep the first maximum.
std::optional<CandidateScore> oracle_best(std::span<const std::size_t> rows, const Dataset& d,
                                          const SplitOptions& options) {
  ClassCounts parent(d.n_classes(), 0);
  for (auto i : rows) ++parent[static_cast<std::size_t>(d.response[i])];
  if (gini(parent) == 0.0) return std::nullopt;
  std::optional<CandidateScore> best;
  for (std::size_t p = 0; p < d.n_predictors(); ++p) {
    for (const auto& spec : enumerate_candidates(rows, d, p, options)) {
      const auto children = child_class_counts(rows, d, spec);
      int non_empty = 0;
      bool small = false;
      for (const auto& c : children) {
        const auto n = std::accumulate(c.begin(), c.end(), std::size_t{0});
        if (n == 0) continue;
        ++non_empty;
        small |= n < options.min_child_size;
      }
      if (non_empty < 2 || small) continue;
      const double delta = delta_impurity(parent, children);
      if (!best || delta > best->delta + 1e-12) best = CandidateScore{spec, delta, children};
    }
  }
  return best;
}

Dataset two_column_dataset() {
  // Histograms separate the classes perfectly; the point column only partly.
  Dataset d;
  d.class_labels = {"A", "B"};
  d.predictors = {{"x", ColumnKind::Point}, {"h", ColumnKind::Histogram}};
  const std::vector<double> xs{0.1, 0.4, 0.2, 0.9, 0.3, 0.8, 0.7, 0.6};
  const std::vector<int> ys{0, 0, 0, 0, 1, 1, 1, 1};
  d.cells.resize(2);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d.cells[0].push_back(xs[i]);
    d.cells[1].push_back(ys[i] == 0 ? histogram_with_midpoints({1, 2, 3}) : histogram_with_midpoints({4, 5, 6}));
  }
  d.response = ys;
  return d;
}

}  // namespace

TEST_CASE("point routing") {
  CHECK(route_point(0.5, 0.589) == Branch::Left);
  CHECK(route_point(0.589, 0.589) == Branch::Left);
  CHECK(route_point(1823.68, 1823.67) == Branch::Right);
}

TEST_CASE("interval routing") {
  const Interval ref{0.20, 0.23};
  CHECK(route_interval({0.10, 0.15}, ref) == Branch::Left);
  CHECK(route_interval({0.25, 0.30}, ref) == Branch::Right);
  CHECK(route_interval({0.21, 0.22}, ref) == Branch::Center);
  CHECK(route_interval({0.10, 0.30}, ref) == Branch::Center);
  CHECK(route_interval({0.10, 0.21}, ref) == Branch::Left);
  CHECK(route_interval({0.20, 0.22}, ref) == Branch::Center);  // shared lower bound
}

TEST_CASE("histogram routing") {
  const auto ref = histogram_with_midpoints({1, 2, 3});
  const auto j = histogram_with_midpoints({4, 5, 6});
  CHECK(route_histogram(ref, ref, 0.05) == Branch::Center);
  CHECK(route_histogram(j, ref, 0.05) == Branch::Left);   // T = -1.964, p = 0.0495
  CHECK(route_histogram(j, ref, 0.01) == Branch::Center);
  CHECK(route_histogram(ref, j, 0.05) == Branch::Right);
}

TEST_CASE("generic routing rejects the wrong cell kind") {
  CHECK_THROWS_AS(route(PointCut{0.0}, MVValue{Interval{0, 1}}), DataError);
  CHECK(route(NominalSubset{{"a", "c"}}, MVValue{Category{"c"}}) == Branch::Left);
  CHECK(route(NominalSubset{{"a", "c"}}, MVValue{Category{"b"}}) == Branch::Right);
}

TEST_CASE("candidate counts per predictor kind") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"num", ColumnKind::Point}, {"cat", ColumnKind::Categorical},
                  {"hist", ColumnKind::Histogram}, {"iv", ColumnKind::Interval}};
  d.cells.resize(4);
  const std::vector<double> nums{3, 1, 4, 2, 2};
  const std::vector<std::string> cats{"r", "g", "b", "g", "r"};
  for (std::size_t i = 0; i < 5; ++i) {
    d.cells[0].push_back(nums[i]);
    d.cells[1].push_back(Category{cats[i]});
    d.cells[2].push_back(histogram_with_midpoints({double(i), double(i) + 1.0}));
    d.cells[3].push_back(Interval{double(i), double(i) + 0.5});
  }
  d.response = {0, 1, 0, 1, 0};
  const auto rows = all_rows(d);

  const auto points = enumerate_candidates(rows, d, 0);
  REQUIRE(points.size() == 3);
  CHECK(std::get<PointCut>(points[0].rule).cutpoint == 1.0);
  CHECK(std::get<PointCut>(points[2].rule).cutpoint == 3.0);
  CHECK(enumerate_candidates(rows, d, 1).size() == 3);
  const auto hists = enumerate_candidates(rows, d, 2);
  CHECK(hists.size() == 5);
  CHECK(hists[3].reference_object == 3u);

  // Intervals strictly ordered: references i yield distinct routings.
  CHECK(enumerate_candidates(rows, d, 3).size() == 5);

  // Duplicated histograms collapse to one reference.
  d.cells[2][4] = d.cells[2][0];
  CHECK(enumerate_candidates(rows, d, 2).size() == 4);

  // A constant column has no candidates.
  for (auto& c : d.cells[0]) c = 1.0;
  CHECK(enumerate_candidates(rows, d, 0).empty());
}

TEST_CASE("interval references with identical routing are deduplicated") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"iv", ColumnKind::Interval}};
  d.cells = {{Interval{4, 6}, Interval{4.5, 5.5}, Interval{0, 10}, Interval{20, 30}, Interval{-1, 8}}};
  d.response = {0, 1, 0, 1, 1};
  const auto rows = all_rows(d);
  const auto refs = enumerate_candidates(rows, d, 0);
  // [4,6] and [4.5,5.5] both route as C C C R C; the second is dropped.
  REQUIRE(refs.size() == 4);
  CHECK(refs[0].reference_object == 0u);
  CHECK(refs[1].reference_object == 2u);
  CHECK(refs[2].reference_object == 3u);
  CHECK(refs[3].reference_object == 4u);
}

TEST_CASE("max_references caps and is reproducible") {
  GenSpec spec = signal_in_shape_spec(20, 3);
  const auto d = generate(spec);
  const auto rows = all_rows(d);
  SplitOptions capped;
  capped.max_references = 7;
  capped.seed = 99;
  const auto a = enumerate_candidates(rows, d, 2, capped);
  const auto b = enumerate_candidates(rows, d, 2, capped);
  CHECK(a.size() == 7);
  CHECK(a == b);
  for (std::size_t k = 1; k < a.size(); ++k) CHECK(*a[k - 1].reference_object < *a[k].reference_object);
}

TEST_CASE("impurity decrease") {
  const std::vector<std::size_t> p22{2, 2};
  const std::vector<ClassCounts> perfect{{2, 0}, {0, 2}};
  CHECK(delta_impurity(p22, perfect) == doctest::Approx(0.5));

  const std::vector<std::size_t> p44{4, 4};
  const std::vector<ClassCounts> ternary{{2, 0}, {1, 2}, {1, 2}};
  // 0.5 - (2/8*0 + 3/8*4/9 + 3/8*4/9)
  CHECK(std::abs(delta_impurity(p44, ternary) - 1.0 / 6.0) < 1e-5);

  const std::vector<std::size_t> p33{3, 3};
  const std::vector<ClassCounts> none{{3, 3}};
  CHECK(delta_impurity(p33, none) == 0.0);

  const std::vector<ClassCounts> broken{{2, 0}, {1, 2}};
  CHECK_THROWS_AS(delta_impurity(p44, broken), UsageError);
}

TEST_CASE("best split picks the histogram when it separates better") {
  const auto d = two_column_dataset();
  const auto rows = all_rows(d);
  const auto best = best_split(rows, d, SplitOptions{});
  REQUIRE(best);
  CHECK(best->spec.predictor == 1);
  CHECK(std::holds_alternative<HistogramRef>(best->spec.rule));
  CHECK(best->delta == doctest::Approx(0.5));
  CHECK(best->spec.reference_object == 0u);
  const auto oracle = oracle_best(rows, d, SplitOptions{});
  REQUIRE(oracle);
  CHECK(oracle->spec == best->spec);
}

TEST_CASE("best split on separable points and pure nodes") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"x", ColumnKind::Point}};
  d.cells = {{-2.0, -1.0, -0.5, 0.5, 1.0, 3.0}};
  d.response = {0, 0, 0, 1, 1, 1};
  auto rows = all_rows(d);
  const auto best = best_split(rows, d, SplitOptions{});
  REQUIRE(best);
  CHECK(std::get<PointCut>(best->spec.rule).cutpoint == -0.5);
  CHECK(best->delta == doctest::Approx(0.5));

  d.response = {1, 1, 1, 1, 1, 1};
  CHECK_FALSE(best_split(rows, d, SplitOptions{}));
}

TEST_CASE("min_child_size filters small children") {
  Dataset d;
  d.class_labels = {"a", "b"};
  d.predictors = {{"x", ColumnKind::Point}};
  d.cells = {{1.0, 2.0, 3.0, 4.0}};
  d.response = {0, 1, 1, 1};
  auto rows = all_rows(d);
  SplitOptions options;
  options.min_child_size = 2;
  const auto best = best_split(rows, d, options);
  REQUIRE(best);
  CHECK(std::get<PointCut>(best->spec.rule).cutpoint == 2.0);
  options.min_child_size = 3;
  CHECK_FALSE(best_split(rows, d, options));
}

TEST_CASE("best split equals the exhaustive oracle on random mixed data") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    GenSpec spec;
    spec.n_per_class = 12;
    spec.seed = seed;
    spec.point_shift = 0.7;
    spec.interval_drift = 0.7;
    spec.histogram_family[1].components = {{1.0, 0.8, 1.0}};
    spec.samples_per_histogram = 15;
    spec.bins = 8;
    spec.noise_columns = 3;
    const auto d = generate(spec);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> rows = all_rows(d);
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.resize(16);
    std::sort(rows.begin(), rows.end());
    for (std::size_t min_child : {1, 3}) {
      SplitOptions options;
      options.min_child_size = min_child;
      options.alpha = 0.2;
      const auto fast = best_split(rows, d, options);
      const auto slow = oracle_best(rows, d, options);
      REQUIRE(fast.has_value() == slow.has_value());
      if (!fast) continue;
      CHECK(fast->delta == doctest::Approx(slow->delta).epsilon(1e-12));
      CHECK(fast->spec == slow->spec);
      CHECK(fast->child_counts == slow->child_counts);
    }
  }
}

TEST_CASE("property: self routing is central and interval routing antisymmetric") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-5.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    double a = unit(rng), b = unit(rng), c = unit(rng), e = unit(rng);
    const Interval x{std::min(a, b), std::max(a, b)};
    const Interval y{std::min(c, e), std::max(c, e)};
    CHECK(route_interval(x, x) == Branch::Center);
    if (route_interval(x, y) == Branch::Left) CHECK(route_interval(y, x) == Branch::Right);
    if (route_interval(x, y) == Branch::Right) CHECK(route_interval(y, x) == Branch::Left);

    const auto h = dclass::testing::random_histogram(rng);
    CHECK(route_histogram(h, h, 0.5) == Branch::Center);
    CHECK(route_histogram(h, h, 0.5, true) == Branch::Center);
  }
}

TEST_CASE("property: child counts partition the parent and delta is non-negative") {
  std::mt19937_64 rng(23);
  GenSpec spec = signal_in_shape_spec(15, 4);
  spec.noise_columns = 4;
  const auto d = generate(spec);
  const auto rows = all_rows(d);
  ClassCounts parent(2, 0);
  for (auto i : rows) ++parent[static_cast<std::size_t>(d.response[i])];
  for (std::size_t p = 0; p < d.n_predictors(); ++p) {
    for (const auto& s : enumerate_candidates(rows, d, p)) {
      const auto children = child_class_counts(rows, d, s);
      ClassCounts sum(2, 0);
      for (const auto& c : children)
        for (std::size_t k = 0; k < 2; ++k) sum[k] += c[k];
      CHECK(sum == parent);
      CHECK(delta_impurity(parent, children) >= -1e-12);
      if (!s.ternary()) CHECK(std::accumulate(children[1].begin(), children[1].end(), 0u) == 0u);
    }
  }
}

TEST_CASE("best split is deterministic") {
  GenSpec spec = signal_in_shape_spec(25, 8);
  spec.noise_columns = 3;
  const auto d = generate(spec);
  const auto rows = all_rows(d);
  const auto a = best_split(rows, d, SplitOptions{});
  const auto b = best_split(rows, d, SplitOptions{});
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->spec == b->spec);
  CHECK(a->delta == b->delta);
}
