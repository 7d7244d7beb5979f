#include "dclass/mvv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dclass/error.hpp"

namespace dclass {

namespace {

constexpr double kNormalizeTolerance = 1e-6;

}  // namespace

Interval Interval::make(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper))
    throw DataError("interval bounds must be finite");
  if (lower > upper)
    throw DataError(fmt::format("interval lower exceeds upper: [{}, {}]", lower, upper));
  return Interval{lower, upper};
}

Histogram::Histogram(std::vector<Interval> bins, std::vector<double> freqs)
    : bins_(std::move(bins)), freqs_(std::move(freqs)) {
  if (bins_.empty()) throw DataError("histogram needs at least one bin");
  if (bins_.size() != freqs_.size())
    throw DataError(fmt::format("histogram has {} bins but {} frequencies", bins_.size(),
                                freqs_.size()));
  for (std::size_t h = 0; h < bins_.size(); ++h) {
    const auto& bin = bins_[h];
    if (!std::isfinite(bin.lower) || !std::isfinite(bin.upper) || !(bin.lower < bin.upper))
      throw DataError(fmt::format("histogram bin {} is empty or not finite", h));
    if (h > 0 && bins_[h - 1].upper != bin.lower)
      throw DataError(fmt::format("histogram bins {} and {} are not contiguous", h - 1, h));
    if (!std::isfinite(freqs_[h]) || freqs_[h] < 0.0)
      throw DataError(fmt::format("histogram frequency {} is negative", h));
  }
  const double total = std::accumulate(freqs_.begin(), freqs_.end(), 0.0);
  if (std::abs(total - 1.0) > kNormalizeTolerance)
    throw DataError(fmt::format("histogram frequencies sum to {}, not 1", total));
  // Sums already within rounding of 1 are kept as is, so a serialized
  // histogram parses back to identical frequencies.
  if (std::abs(total - 1.0) > 1e-12)
    for (auto& f : freqs_) f /= total;
}

std::vector<double> Histogram::midpoints() const {
  std::vector<double> out;
  out.reserve(bins_.size());
  for (const auto& bin : bins_) out.push_back(bin.midpoint());
  return out;
}

std::string_view to_string(ColumnKind kind) noexcept {
  switch (kind) {
    case ColumnKind::Point: return "point";
    case ColumnKind::Interval: return "interval";
    case ColumnKind::Histogram: return "histogram";
    case ColumnKind::Categorical: return "categorical";
  }
  return "point";
}

ColumnKind column_kind_from_string(std::string_view text) {
  if (text == "point") return ColumnKind::Point;
  if (text == "interval") return ColumnKind::Interval;
  if (text == "histogram") return ColumnKind::Histogram;
  if (text == "categorical") return ColumnKind::Categorical;
  throw DataError(fmt::format("unknown predictor kind '{}'", text));
}

ColumnKind kind_of(const MVValue& value) noexcept {
  switch (value.index()) {
    case 0: return ColumnKind::Point;
    case 1: return ColumnKind::Interval;
    case 2: return ColumnKind::Histogram;
    default: return ColumnKind::Categorical;
  }
}

std::vector<MVValue> Dataset::row(std::size_t object) const {
  std::vector<MVValue> out;
  out.reserve(cells.size());
  for (const auto& column : cells) out.push_back(column.at(object));
  return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(class_labels.size(), 0);
  for (int y : response) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.class_labels = class_labels;
  out.predictors = predictors;
  out.cells.resize(cells.size());
  for (std::size_t p = 0; p < cells.size(); ++p) {
    out.cells[p].reserve(rows.size());
    for (auto i : rows) out.cells[p].push_back(cells[p].at(i));
  }
  out.response.reserve(rows.size());
  for (auto i : rows) out.response.push_back(response.at(i));
  return out;
}

void Dataset::validate() const {
  if (response.empty()) throw DataError("dataset has no objects");
  if (class_labels.empty()) throw DataError("dataset has no class labels");
  if (cells.size() != predictors.size())
    throw DataError("predictor metadata does not match column count");
  for (std::size_t a = 0; a < class_labels.size(); ++a)
    for (std::size_t b = a + 1; b < class_labels.size(); ++b)
      if (class_labels[a] == class_labels[b])
        throw DataError(fmt::format("duplicate class label '{}'", class_labels[a]));
  for (int y : response)
    if (y < 0 || static_cast<std::size_t>(y) >= class_labels.size())
      throw DataError(fmt::format("response code {} out of range", y));
  for (std::size_t p = 0; p < cells.size(); ++p) {
    if (cells[p].size() != response.size())
      throw DataError(fmt::format("predictor '{}' has {} cells for {} objects",
                                  predictors[p].name, cells[p].size(), response.size()));
    for (const auto& cell : cells[p])
      if (kind_of(cell) != predictors[p].kind)
        throw DataError(fmt::format("predictor '{}' mixes cell kinds ({} expected, {} found)",
                                    predictors[p].name, to_string(predictors[p].kind),
                                    to_string(kind_of(cell))));
  }
}

double reduce_interval(const Interval& value, IntervalReduction mode) noexcept {
  switch (mode) {
    case IntervalReduction::Lower: return value.lower;
    case IntervalReduction::Upper: return value.upper;
    case IntervalReduction::Mean: return value.midpoint();
  }
  return value.midpoint();
}

double reduce_histogram(const Histogram& value, HistogramReduction mode) {
  const auto& bins = value.bins();
  const auto& freqs = value.freqs();
  if (mode == HistogramReduction::Mean) {
    double mean = 0.0;
    for (std::size_t h = 0; h < bins.size(); ++h) mean += freqs[h] * bins[h].midpoint();
    return mean;
  }
  // Linear-interpolated ECDF inverse at 0.5.
  double cumulative = 0.0;
  for (std::size_t h = 0; h < bins.size(); ++h) {
    if (freqs[h] <= 0.0) continue;
    if (cumulative + freqs[h] >= 0.5 - 1e-12) {
      const double fraction = std::clamp((0.5 - cumulative) / freqs[h], 0.0, 1.0);
      return bins[h].lower + fraction * bins[h].width();
    }
    cumulative += freqs[h];
  }
  return value.support_upper();
}

double ecdf_eval(const Histogram& h, double u) noexcept {
  if (u < h.support_lower()) return 0.0;
  if (u >= h.support_upper()) return 1.0;
  const auto& bins = h.bins();
  const auto& freqs = h.freqs();
  double cumulative = 0.0;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (u < bins[k].upper) {
      const double fraction = (u - bins[k].lower) / bins[k].width();
      return std::clamp(cumulative + fraction * freqs[k], 0.0, 1.0);
    }
    cumulative += freqs[k];
  }
  return 1.0;
}

HistogramSummary summarize(const Histogram& h) {
  HistogramSummary s;
  s.min = h.support_lower();
  s.max = h.support_upper();
  const auto mids = h.midpoints();
  const auto& freqs = h.freqs();
  for (std::size_t k = 0; k < mids.size(); ++k) s.mean += freqs[k] * mids[k];
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < mids.size(); ++k) {
    const double d = mids[k] - s.mean;
    m2 += freqs[k] * d * d;
    m3 += freqs[k] * d * d * d;
    m4 += freqs[k] * d * d * d * d;
  }
  s.sd = std::sqrt(m2);
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  return s;
}

}  // namespace dclass
