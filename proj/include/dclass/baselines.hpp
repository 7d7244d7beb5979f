#pragma once

// Scalar-reduction CART baselines: interval and histogram cells are collapsed
// to one number each, then a standard binary tree is grown with the same
// engine and parameters used for mixed trees.

#include <array>
#include <string>

#include "dclass/mvv.hpp"
#include "dclass/tree.hpp"

namespace dclass {

struct BaselineSpec {
  IntervalReduction interval_mode = IntervalReduction::Mean;
  HistogramReduction histogram_mode = HistogramReduction::Mean;

  /// "CART_<Lower|Upper|Mean>_<Mean|Median>".
  std::string name() const;

  friend bool operator==(const BaselineSpec&, const BaselineSpec&) = default;
};

/// The six comparison algorithms in reporting order.
const std::array<BaselineSpec, 6>& all_baselines();

/// Parses a baseline name as produced by BaselineSpec::name().
BaselineSpec baseline_from_name(std::string_view name);

/// Maps interval and histogram columns to point columns; everything else,
/// including column order and the response, is preserved.
Dataset preprocess(const Dataset& data, const BaselineSpec& spec);

/// Binary CART growth on an all-point/categorical dataset. Throws DataError
/// if an interval or histogram column is present.
Tree cart_grow(const Dataset& data, const GrowParams& params = {});

}  // namespace dclass
