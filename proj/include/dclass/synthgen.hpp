#pragma once

// Seeded two-class generator of mixed point/interval/histogram datasets.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "dclass/mvv.hpp"

namespace dclass {

struct NormalComponent {
  double weight = 1.0;
  double location = 0.0;
  double scale = 1.0;  // standard deviation
};

/// Finite Gaussian mixture; weights are normalized on use.
struct MixtureLaw {
  std::vector<NormalComponent> components{NormalComponent{}};

  double mean() const;
};

struct GenSpec {
  std::size_t n_per_class = 50;
  /// Class-1 offset of the point predictor's mean.
  double point_shift = 0.0;
  /// Class-1 offset of the interval predictor's centers.
  double interval_drift = 0.0;
  /// Per-class law of the values summarized by each histogram cell.
  std::array<MixtureLaw, 2> histogram_family{};
  std::size_t bins = 20;
  std::size_t samples_per_histogram = 100;
  std::size_t noise_columns = 0;
  bool include_point = true;
  bool include_interval = true;
  bool include_histogram = true;
  std::uint64_t seed = 0;
  std::array<std::string, 2> class_labels{"class0", "class1"};

  /// Throws UsageError for empty classes, fewer than 2 bins, non-positive
  /// scales, or a spec with no columns.
  void validate() const;
};

/// Class 0 summarizes N(0,1); class 1 an equal-mean, equal-median bimodal
/// mixture 0.5 N(-2, 0.25) + 0.5 N(2, 0.25). Point and interval columns carry
/// no class signal.
GenSpec signal_in_shape_spec(std::size_t n_per_class, std::uint64_t seed);

/// Identical laws for both classes on every column.
GenSpec no_signal_spec(std::size_t n_per_class, std::size_t noise_columns, std::uint64_t seed);

/// Histogram cells are built by sampling `samples_per_histogram` values and
/// binning them on an equal-width grid shared by the column; empty bins at
/// either end are dropped so each cell covers its observed support.
Dataset generate(const GenSpec& spec);

}  // namespace dclass
