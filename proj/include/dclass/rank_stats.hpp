#pragma once

// Wilcoxon rank-sum machinery for histogram splits, plus the Gini index.

#include <cstddef>
#include <span>
#include <vector>

#include "dclass/mvv.hpp"

namespace dclass {

/// Observations entering a rank-sum test, sorted ascending. Each observation
/// carries a weight; plain samples use weight 1 so that size() == Σ weight.
struct RankSample {
  std::vector<double> values;
  std::vector<double> weights;

  std::size_t size() const noexcept { return values.size(); }

  /// Unit-weight sample from arbitrary (unsorted) values.
  static RankSample from_values(std::vector<double> values);
};

/// One observation per bin at the bin midpoint. With `weighted`, the bins
/// carry weight π_h·H instead of 1 (total weight is still H).
RankSample histogram_to_rank_sample(const Histogram& h, bool weighted = false);

/// Sum of the mid-ranks of `reference`'s observations in the merged sample.
/// Weighted observations get rank = (weight strictly below) + (tied weight + 1) / 2.
double wilcoxon_w(const RankSample& reference, const RankSample& other);

/// (W − n_ref(n_ref+n_other+1)/2) / sqrt(n_ref·n_other·(n_ref+n_other+1)/12).
/// Returns 0 when the variance is degenerate.
double studentized_t(double w, std::size_t n_ref, std::size_t n_other) noexcept;

/// 2·(1 − Φ(|t|)).
double normal_two_sided_p(double t) noexcept;

struct TestResult {
  double w = 0.0;
  double t = 0.0;
  double p_value = 1.0;
  bool degenerate = false;
};

TestResult rank_sum_test(const RankSample& reference, const RankSample& other);

/// 1 − Σ (count_c / n)². Throws UsageError on all-zero counts.
double gini(std::span<const std::size_t> class_counts);

}  // namespace dclass
