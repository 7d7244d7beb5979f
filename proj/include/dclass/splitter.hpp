#pragma once

// Candidate split generation, routing and impurity scoring for binary point
// splits and ternary interval/histogram splits.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dclass/mvv.hpp"
#include "dclass/rank_stats.hpp"

namespace dclass {

enum class Branch { Left = 0, Center = 1, Right = 2 };

std::string_view to_string(Branch b) noexcept;

/// x <= cutpoint goes Left.
struct PointCut {
  double cutpoint = 0.0;
  friend bool operator==(const PointCut&, const PointCut&) = default;
};

/// Levels in `left_levels` (sorted) go Left, every other level Right.
struct NominalSubset {
  std::vector<std::string> left_levels;
  friend bool operator==(const NominalSubset&, const NominalSubset&) = default;
};

struct IntervalRef {
  Interval reference;
  friend bool operator==(const IntervalRef&, const IntervalRef&) = default;
};

struct HistogramRef {
  Histogram reference;
  double alpha = 0.05;
  bool weighted_ranks = false;
  friend bool operator==(const HistogramRef&, const HistogramRef&) = default;
};

using SplitRule = std::variant<PointCut, NominalSubset, IntervalRef, HistogramRef>;

struct SplitSpec {
  std::size_t predictor = 0;
  SplitRule rule;
  /// Row id (in the growing dataset) of the reference object; set only for
  /// interval and histogram splits.
  std::optional<std::size_t> reference_object;

  bool ternary() const noexcept {
    return std::holds_alternative<IntervalRef>(rule) || std::holds_alternative<HistogramRef>(rule);
  }

  friend bool operator==(const SplitSpec&, const SplitSpec&) = default;
};

using ClassCounts = std::vector<std::size_t>;

struct CandidateScore {
  SplitSpec spec;
  double delta = 0.0;
  /// Indexed by Branch.
  std::array<ClassCounts, 3> child_counts;
};

Branch route_point(double x, double cutpoint) noexcept;
Branch route_interval(const Interval& object, const Interval& reference) noexcept;
/// Ranks the reference against the object: T < 0 with p < alpha routes Left,
/// T > 0 with p < alpha routes Right, anything else Center.
Branch route_histogram(const Histogram& object, const Histogram& reference, double alpha,
                       bool weighted_ranks = false);
Branch route_rank_samples(const RankSample& object, const RankSample& reference,
                          double alpha) noexcept;

/// Routes one cell; throws DataError when the cell kind does not match the rule.
Branch route(const SplitRule& rule, const MVValue& cell);

struct SplitOptions {
  double alpha = 0.05;
  std::size_t min_child_size = 1;
  bool weighted_ranks = false;
  /// Caps the number of interval/histogram references scored per predictor.
  std::optional<std::size_t> max_references;
  std::uint64_t seed = 0;
};

/// Per-dataset caches reused across nodes: rank samples of histogram cells
/// and sorted level lists of categorical columns.
class SplitContext {
 public:
  SplitContext(const Dataset& data, bool weighted_ranks);

  const Dataset& data() const noexcept { return *data_; }
  const RankSample& rank_sample(std::size_t predictor, std::size_t object) const {
    return rank_samples_[predictor][object];
  }

 private:
  const Dataset* data_;
  std::vector<std::vector<RankSample>> rank_samples_;
};

/// All candidate splits of one predictor over the rows of a node, in
/// tie-break order (ascending cutpoint / first reference row).
std::vector<SplitSpec> enumerate_candidates(std::span<const std::size_t> rows, const Dataset& data,
                                            std::size_t predictor, const SplitOptions& options = {});

/// Gini(parent) − Σ_k (n_k / n) Gini(child_k) over non-empty children. Throws
/// UsageError when the children do not partition the parent.
double delta_impurity(std::span<const std::size_t> parent_counts,
                      std::span<const ClassCounts> child_counts);

/// Routes node rows under `spec` and tallies per-branch class counts.
std::array<ClassCounts, 3> child_class_counts(std::span<const std::size_t> rows, const Dataset& data,
                                              const SplitSpec& spec);

/// Best admissible split over every predictor, or nothing when no candidate
/// has at least two non-empty children all of size >= min_child_size. Ties
/// keep the earliest candidate (lower predictor, then lower cutpoint or
/// reference row).
std::optional<CandidateScore> best_split(std::span<const std::size_t> rows,
                                         const SplitContext& context, const SplitOptions& options);
std::optional<CandidateScore> best_split(std::span<const std::size_t> rows, const Dataset& data,
                                         const SplitOptions& options);

}  // namespace dclass
