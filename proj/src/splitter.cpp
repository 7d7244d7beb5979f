#include "dclass/splitter.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <unordered_set>

#include <fmt/format.h>

#include "dclass/error.hpp"

namespace dclass {

namespace {

constexpr std::size_t kMaxCategoricalLevels = 20;
constexpr double kTieTolerance = 1e-12;

using BranchCounts = std::array<ClassCounts, 3>;

BranchCounts empty_counts(std::size_t n_classes) {
  return {ClassCounts(n_classes, 0), ClassCounts(n_classes, 0), ClassCounts(n_classes, 0)};
}

std::size_t total(const ClassCounts& c) { return std::accumulate(c.begin(), c.end(), std::size_t{0}); }

bool admissible(const BranchCounts& children, std::size_t min_child_size) {
  int non_empty = 0;
  for (const auto& c : children) {
    const auto n = total(c);
    if (n == 0) continue;
    if (n < min_child_size) return false;
    ++non_empty;
  }
  return non_empty >= 2;
}

double delta_of(double parent_gini, std::size_t parent_total, const BranchCounts& children) {
  double weighted = 0.0;
  for (const auto& c : children) {
    const auto n = total(c);
    if (n == 0) continue;
    weighted += static_cast<double>(n) / static_cast<double>(parent_total) * gini(c);
  }
  return parent_gini - weighted;
}

ClassCounts counts_of(std::span<const std::size_t> rows, const Dataset& data) {
  ClassCounts c(data.n_classes(), 0);
  for (auto i : rows) ++c[static_cast<std::size_t>(data.response[i])];
  return c;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

template <class T>
std::vector<std::size_t> first_distinct_rows(std::span<const std::size_t> rows,
                                             const std::vector<MVValue>& column) {
  std::vector<std::size_t> out;
  for (auto i : rows) {
    const auto& value = std::get<T>(column[i]);
    const bool seen = std::any_of(out.begin(), out.end(),
                                  [&](std::size_t k) { return std::get<T>(column[k]) == value; });
    if (!seen) out.push_back(i);
  }
  return out;
}

// Distinct reference rows for an interval/histogram predictor, in ascending
// first-occurrence order, optionally subsampled.
std::vector<std::size_t> reference_rows(std::span<const std::size_t> rows, const Dataset& data,
                                        std::size_t predictor, const SplitOptions& options) {
  const auto& column = data.cells[predictor];
  std::vector<std::size_t> refs = data.predictors[predictor].kind == ColumnKind::Interval
                                      ? first_distinct_rows<Interval>(rows, column)
                                      : first_distinct_rows<Histogram>(rows, column);
  if (options.max_references && refs.size() > *options.max_references) {
    std::mt19937_64 rng(mix(options.seed ^ mix(predictor)));
    std::vector<std::size_t> picked;
    std::sample(refs.begin(), refs.end(), std::back_inserter(picked), *options.max_references, rng);
    std::sort(picked.begin(), picked.end());
    refs = std::move(picked);
  }
  return refs;
}

std::vector<std::string> sorted_levels(std::span<const std::size_t> rows,
                                       const std::vector<MVValue>& column) {
  std::vector<std::string> levels;
  for (auto i : rows) levels.push_back(std::get<Category>(column[i]).label);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (levels.size() > kMaxCategoricalLevels)
    throw DataError(fmt::format("categorical predictor has {} levels; at most {} are supported",
                                levels.size(), kMaxCategoricalLevels));
  return levels;
}

std::vector<std::string> subset_from_mask(const std::vector<std::string>& levels, std::uint64_t mask) {
  std::vector<std::string> left;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k)
    if (mask & (std::uint64_t{1} << k)) left.push_back(levels[k]);
  return left;
}

struct Best {
  std::optional<CandidateScore> score;

  bool improves(double delta) const {
    return !score || delta > score->delta + kTieTolerance;
  }
  void offer(double delta, const BranchCounts& children, auto&& make_spec) {
    if (!improves(delta)) return;
    score = CandidateScore{make_spec(), delta, children};
  }
};

}  // namespace

std::string_view to_string(Branch b) noexcept {
  switch (b) {
    case Branch::Left: return "left";
    case Branch::Center: return "center";
    case Branch::Right: return "right";
  }
  return "center";
}

Branch route_point(double x, double cutpoint) noexcept {
  return x <= cutpoint ? Branch::Left : Branch::Right;
}

Branch route_interval(const Interval& object, const Interval& reference) noexcept {
  if (object.lower < reference.lower && object.upper < reference.upper) return Branch::Left;
  if (object.lower > reference.lower && object.upper > reference.upper) return Branch::Right;
  return Branch::Center;
}

Branch route_rank_samples(const RankSample& object, const RankSample& reference,
                          double alpha) noexcept {
  const auto result = rank_sum_test(reference, object);
  if (result.degenerate || !(result.p_value < alpha)) return Branch::Center;
  if (result.t < 0.0) return Branch::Left;
  if (result.t > 0.0) return Branch::Right;
  return Branch::Center;
}

Branch route_histogram(const Histogram& object, const Histogram& reference, double alpha,
                       bool weighted_ranks) {
  return route_rank_samples(histogram_to_rank_sample(object, weighted_ranks),
                            histogram_to_rank_sample(reference, weighted_ranks), alpha);
}

Branch route(const SplitRule& rule, const MVValue& cell) {
  return std::visit(
      [&](const auto& r) -> Branch {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PointCut>) {
          if (const auto* x = std::get_if<double>(&cell)) return route_point(*x, r.cutpoint);
          throw DataError("point split applied to a non-point cell");
        } else if constexpr (std::is_same_v<R, NominalSubset>) {
          const auto* c = std::get_if<Category>(&cell);
          if (!c) throw DataError("nominal split applied to a non-categorical cell");
          return std::binary_search(r.left_levels.begin(), r.left_levels.end(), c->label)
                     ? Branch::Left
                     : Branch::Right;
        } else if constexpr (std::is_same_v<R, IntervalRef>) {
          if (const auto* v = std::get_if<Interval>(&cell)) return route_interval(*v, r.reference);
          throw DataError("interval split applied to a non-interval cell");
        } else {
          if (const auto* h = std::get_if<Histogram>(&cell))
            return route_histogram(*h, r.reference, r.alpha, r.weighted_ranks);
          throw DataError("histogram split applied to a non-histogram cell");
        }
      },
      rule);
}

SplitContext::SplitContext(const Dataset& data, bool weighted_ranks)
    : data_(&data), rank_samples_(data.n_predictors()) {
  for (std::size_t p = 0; p < data.n_predictors(); ++p) {
    if (data.predictors[p].kind != ColumnKind::Histogram) continue;
    auto& samples = rank_samples_[p];
    samples.reserve(data.n_objects());
    for (const auto& cell : data.cells[p])
      samples.push_back(histogram_to_rank_sample(std::get<Histogram>(cell), weighted_ranks));
  }
}

std::vector<SplitSpec> enumerate_candidates(std::span<const std::size_t> rows, const Dataset& data,
                                            std::size_t predictor, const SplitOptions& options) {
  std::vector<SplitSpec> out;
  const auto& column = data.cells.at(predictor);
  switch (data.predictors[predictor].kind) {
    case ColumnKind::Point: {
      std::vector<double> values;
      for (auto i : rows) values.push_back(std::get<double>(column[i]));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      for (std::size_t k = 0; k + 1 < values.size(); ++k)
        out.push_back({predictor, PointCut{values[k]}, std::nullopt});
      break;
    }
    case ColumnKind::Categorical: {
      const auto levels = sorted_levels(rows, column);
      if (levels.size() < 2) break;
      const std::uint64_t n_masks = (std::uint64_t{1} << (levels.size() - 1)) - 1;
      for (std::uint64_t mask = 1; mask <= n_masks; ++mask)
        out.push_back({predictor, NominalSubset{subset_from_mask(levels, mask)}, std::nullopt});
      break;
    }
    case ColumnKind::Interval: {
      std::vector<std::vector<Branch>> seen;
      for (auto r : reference_rows(rows, data, predictor, options)) {
        const auto& ref = std::get<Interval>(column[r]);
        std::vector<Branch> routing;
        routing.reserve(rows.size());
        for (auto i : rows) routing.push_back(route_interval(std::get<Interval>(column[i]), ref));
        if (std::find(seen.begin(), seen.end(), routing) != seen.end()) continue;
        seen.push_back(std::move(routing));
        out.push_back({predictor, IntervalRef{ref}, r});
      }
      break;
    }
    case ColumnKind::Histogram: {
      for (auto r : reference_rows(rows, data, predictor, options))
        out.push_back({predictor,
                       HistogramRef{std::get<Histogram>(column[r]), options.alpha,
                                    options.weighted_ranks},
                       r});
      break;
    }
  }
  return out;
}

double delta_impurity(std::span<const std::size_t> parent_counts,
                      std::span<const ClassCounts> child_counts) {
  ClassCounts summed(parent_counts.size(), 0);
  for (const auto& child : child_counts) {
    if (child.size() != parent_counts.size())
      throw UsageError("child class-count vector has the wrong number of classes");
    for (std::size_t c = 0; c < child.size(); ++c) summed[c] += child[c];
  }
  if (!std::equal(summed.begin(), summed.end(), parent_counts.begin()))
    throw UsageError("child class counts do not sum to the parent counts");
  const auto n = std::accumulate(parent_counts.begin(), parent_counts.end(), std::size_t{0});
  double weighted = 0.0;
  for (const auto& child : child_counts) {
    const auto nk = total(child);
    if (nk == 0) continue;
    weighted += static_cast<double>(nk) / static_cast<double>(n) * gini(child);
  }
  return gini(parent_counts) - weighted;
}

std::array<ClassCounts, 3> child_class_counts(std::span<const std::size_t> rows, const Dataset& data,
                                              const SplitSpec& spec) {
  auto counts = empty_counts(data.n_classes());
  const auto& column = data.cells.at(spec.predictor);
  for (auto i : rows) {
    const auto b = route(spec.rule, column[i]);
    ++counts[static_cast<std::size_t>(b)][static_cast<std::size_t>(data.response[i])];
  }
  return counts;
}

std::optional<CandidateScore> best_split(std::span<const std::size_t> rows,
                                         const SplitContext& context, const SplitOptions& options) {
  const auto& data = context.data();
  if (rows.size() < 2) return std::nullopt;
  const auto n_classes = data.n_classes();
  const auto parent = counts_of(rows, data);
  const double parent_gini = gini(parent);
  if (parent_gini <= 0.0) return std::nullopt;
  const auto n = rows.size();

  Best best;
  for (std::size_t p = 0; p < data.n_predictors(); ++p) {
    const auto& column = data.cells[p];
    switch (data.predictors[p].kind) {
      case ColumnKind::Point: {
        std::vector<std::pair<double, int>> sorted;
        sorted.reserve(n);
        for (auto i : rows) sorted.emplace_back(std::get<double>(column[i]), data.response[i]);
        std::sort(sorted.begin(), sorted.end());
        auto children = empty_counts(n_classes);
        children[2] = parent;
        for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
          const auto y = static_cast<std::size_t>(sorted[k].second);
          ++children[0][y];
          --children[2][y];
          if (sorted[k].first == sorted[k + 1].first) continue;
          if (!admissible(children, options.min_child_size)) continue;
          const double delta = delta_of(parent_gini, n, children);
          const double c = sorted[k].first;
          best.offer(delta, children, [&] { return SplitSpec{p, PointCut{c}, std::nullopt}; });
        }
        break;
      }
      case ColumnKind::Categorical: {
        const auto levels = sorted_levels(rows, column);
        if (levels.size() < 2) break;
        std::vector<ClassCounts> per_level(levels.size(), ClassCounts(n_classes, 0));
        for (auto i : rows) {
          const auto& label = std::get<Category>(column[i]).label;
          const auto k = static_cast<std::size_t>(
              std::lower_bound(levels.begin(), levels.end(), label) - levels.begin());
          ++per_level[k][static_cast<std::size_t>(data.response[i])];
        }
        const std::uint64_t n_masks = (std::uint64_t{1} << (levels.size() - 1)) - 1;
        for (std::uint64_t mask = 1; mask <= n_masks; ++mask) {
          auto children = empty_counts(n_classes);
          for (std::size_t k = 0; k < levels.size(); ++k) {
            const bool left = k + 1 < levels.size() && (mask & (std::uint64_t{1} << k));
            auto& target = children[left ? 0 : 2];
            for (std::size_t c = 0; c < n_classes; ++c) target[c] += per_level[k][c];
          }
          if (!admissible(children, options.min_child_size)) continue;
          const double delta = delta_of(parent_gini, n, children);
          best.offer(delta, children, [&] {
            return SplitSpec{p, NominalSubset{subset_from_mask(levels, mask)}, std::nullopt};
          });
        }
        break;
      }
      case ColumnKind::Interval: {
        for (const auto& spec : enumerate_candidates(rows, data, p, options)) {
          const auto children = child_class_counts(rows, data, spec);
          if (!admissible(children, options.min_child_size)) continue;
          best.offer(delta_of(parent_gini, n, children), children, [&] { return spec; });
        }
        break;
      }
      case ColumnKind::Histogram: {
        for (auto r : reference_rows(rows, data, p, options)) {
          const auto& ref_sample = context.rank_sample(p, r);
          auto children = empty_counts(n_classes);
          for (auto i : rows) {
            const auto b = route_rank_samples(context.rank_sample(p, i), ref_sample, options.alpha);
            ++children[static_cast<std::size_t>(b)][static_cast<std::size_t>(data.response[i])];
          }
          if (!admissible(children, options.min_child_size)) continue;
          best.offer(delta_of(parent_gini, n, children), children, [&] {
            return SplitSpec{p,
                             HistogramRef{std::get<Histogram>(column[r]), options.alpha,
                                          options.weighted_ranks},
                             r};
          });
        }
        break;
      }
    }
  }
  return best.score;
}

std::optional<CandidateScore> best_split(std::span<const std::size_t> rows, const Dataset& data,
                                         const SplitOptions& options) {
  const SplitContext context(data, options.weighted_ranks);
  return best_split(rows, context, options);
}

}  // namespace dclass
