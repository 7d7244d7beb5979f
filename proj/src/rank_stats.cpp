#include "dclass/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dclass/error.hpp"

namespace dclass {

RankSample RankSample::from_values(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  RankSample s;
  s.weights.assign(values.size(), 1.0);
  s.values = std::move(values);
  return s;
}

RankSample histogram_to_rank_sample(const Histogram& h, bool weighted) {
  RankSample s;
  s.values = h.midpoints();  // already ascending: bins are contiguous
  if (weighted) {
    const auto scale = static_cast<double>(h.size());
    s.weights.reserve(h.size());
    for (double f : h.freqs()) s.weights.push_back(f * scale);
  } else {
    s.weights.assign(h.size(), 1.0);
  }
  return s;
}

double wilcoxon_w(const RankSample& reference, const RankSample& other) {
  const auto& a = reference.values;
  const auto& b = other.values;
  std::size_t i = 0, j = 0;
  double below = 0.0;
  double w = 0.0;
  while (i < a.size() || j < b.size()) {
    double v;
    if (j >= b.size() || (i < a.size() && a[i] <= b[j]))
      v = a[i];
    else
      v = b[j];
    double tied_ref = 0.0, tied_other = 0.0;
    while (i < a.size() && a[i] == v) tied_ref += reference.weights[i++];
    while (j < b.size() && b[j] == v) tied_other += other.weights[j++];
    const double tied = tied_ref + tied_other;
    w += tied_ref * (below + (tied + 1.0) / 2.0);
    below += tied;
  }
  return w;
}

double studentized_t(double w, std::size_t n_ref, std::size_t n_other) noexcept {
  const auto ni = static_cast<double>(n_ref);
  const auto nj = static_cast<double>(n_other);
  const double variance = ni * nj * (ni + nj + 1.0) / 12.0;
  if (!(variance > 0.0)) return 0.0;
  return (w - ni * (ni + nj + 1.0) / 2.0) / std::sqrt(variance);
}

double normal_two_sided_p(double t) noexcept {
  return std::clamp(std::erfc(std::abs(t) / std::sqrt(2.0)), 0.0, 1.0);
}

TestResult rank_sum_test(const RankSample& reference, const RankSample& other) {
  TestResult r;
  r.w = wilcoxon_w(reference, other);
  r.degenerate = reference.size() == 0 || other.size() == 0;
  r.t = studentized_t(r.w, reference.size(), other.size());
  r.p_value = normal_two_sided_p(r.t);
  return r;
}

double gini(std::span<const std::size_t> class_counts) {
  const auto total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  if (total == 0) throw UsageError("gini of an empty node");
  const auto n = static_cast<double>(total);
  double sum_sq = 0.0;
  for (auto c : class_counts) {
    const double share = static_cast<double>(c) / n;
    sum_sq += share * share;
  }
  return 1.0 - sum_sq;
}

}  // namespace dclass
