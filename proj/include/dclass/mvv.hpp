#pragma once

// Multivalued data model: point scalars, closed intervals, histograms and
// categorical symbols, plus the scalar reductions used by CART baselines.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dclass {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  /// Validating factory; throws DataError when lower > upper or a bound is
  /// not finite.
  static Interval make(double lower, double upper);

  double width() const noexcept { return upper - lower; }
  double midpoint() const noexcept { return 0.5 * (lower + upper); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Empirical distribution described by contiguous bins [lo, hi) with
/// frequencies. The last bin is closed on the right so the ECDF reaches 1 on
/// the support.
class Histogram {
 public:
  /// Validates contiguity, positive bin widths and non-negative frequencies.
  /// Frequencies summing to within 1e-6 of one are renormalized; a larger
  /// deviation throws DataError.
  Histogram(std::vector<Interval> bins, std::vector<double> freqs);

  std::size_t size() const noexcept { return bins_.size(); }
  const std::vector<Interval>& bins() const noexcept { return bins_; }
  const std::vector<double>& freqs() const noexcept { return freqs_; }

  double support_lower() const noexcept { return bins_.front().lower; }
  double support_upper() const noexcept { return bins_.back().upper; }

  std::vector<double> midpoints() const;

  friend bool operator==(const Histogram&, const Histogram&) = default;

 private:
  std::vector<Interval> bins_;
  std::vector<double> freqs_;
};

/// Categorical symbol, kept distinct from other string-like data.
struct Category {
  std::string label;
  friend bool operator==(const Category&, const Category&) = default;
  friend auto operator<=>(const Category&, const Category&) = default;
};

using MVValue = std::variant<double, Interval, Histogram, Category>;

enum class ColumnKind { Point, Interval, Histogram, Categorical };

std::string_view to_string(ColumnKind kind) noexcept;
/// Parses "point" | "interval" | "histogram" | "categorical".
ColumnKind column_kind_from_string(std::string_view text);
ColumnKind kind_of(const MVValue& value) noexcept;

struct Predictor {
  std::string name;
  ColumnKind kind = ColumnKind::Point;
  friend bool operator==(const Predictor&, const Predictor&) = default;
};

/// n objects x P typed predictors plus an integer-coded class response.
/// Storage is column-major: cells[p][i] is object i on predictor p.
struct Dataset {
  std::vector<std::string> class_labels;
  std::vector<Predictor> predictors;
  std::vector<std::vector<MVValue>> cells;
  std::vector<int> response;

  std::size_t n_objects() const noexcept { return response.size(); }
  std::size_t n_predictors() const noexcept { return predictors.size(); }
  std::size_t n_classes() const noexcept { return class_labels.size(); }

  const MVValue& at(std::size_t object, std::size_t predictor) const {
    return cells[predictor][object];
  }

  /// One object's predictor values in column order.
  std::vector<MVValue> row(std::size_t object) const;

  /// Per-class counts over the whole response.
  std::vector<std::size_t> class_counts() const;

  /// Rows selected by index; indices may repeat (bootstrap samples).
  Dataset subset(std::span<const std::size_t> rows) const;

  /// Checks column homogeneity, label range and shape; throws DataError.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

enum class IntervalReduction { Lower, Upper, Mean };
enum class HistogramReduction { Mean, Median };

double reduce_interval(const Interval& value, IntervalReduction mode) noexcept;
double reduce_histogram(const Histogram& value, HistogramReduction mode);

/// Piecewise-linear cumulative distribution of a histogram.
double ecdf_eval(const Histogram& h, double u) noexcept;

/// Grouped-data moments at bin midpoints, as reported for histogram splits.
struct HistogramSummary {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;
};

HistogramSummary summarize(const Histogram& h);

}  // namespace dclass
