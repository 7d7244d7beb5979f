#include "dclass/baselines.hpp"

#include <fmt/format.h>

#include "dclass/error.hpp"

namespace dclass {

namespace {

const char* interval_word(IntervalReduction m) {
  switch (m) {
    case IntervalReduction::Lower: return "Lower";
    case IntervalReduction::Upper: return "Upper";
    case IntervalReduction::Mean: return "Mean";
  }
  return "Mean";
}

const char* histogram_word(HistogramReduction m) {
  return m == HistogramReduction::Mean ? "Mean" : "Median";
}

}  // namespace

std::string BaselineSpec::name() const {
  return fmt::format("CART_{}_{}", interval_word(interval_mode), histogram_word(histogram_mode));
}

const std::array<BaselineSpec, 6>& all_baselines() {
  using I = IntervalReduction;
  using H = HistogramReduction;
  static const std::array<BaselineSpec, 6> specs{{{I::Lower, H::Mean},
                                                  {I::Upper, H::Mean},
                                                  {I::Lower, H::Median},
                                                  {I::Upper, H::Median},
                                                  {I::Mean, H::Mean},
                                                  {I::Mean, H::Median}}};
  return specs;
}

BaselineSpec baseline_from_name(std::string_view name) {
  for (const auto& spec : all_baselines())
    if (spec.name() == name) return spec;
  throw UsageError(fmt::format("unknown baseline '{}'", name));
}

Dataset preprocess(const Dataset& data, const BaselineSpec& spec) {
  Dataset out = data;
  for (std::size_t p = 0; p < out.n_predictors(); ++p) {
    auto& predictor = out.predictors[p];
    auto& column = out.cells[p];
    if (predictor.kind == ColumnKind::Interval) {
      for (auto& cell : column) cell = reduce_interval(std::get<Interval>(cell), spec.interval_mode);
      predictor.kind = ColumnKind::Point;
    } else if (predictor.kind == ColumnKind::Histogram) {
      for (auto& cell : column) cell = reduce_histogram(std::get<Histogram>(cell), spec.histogram_mode);
      predictor.kind = ColumnKind::Point;
    }
  }
  return out;
}

Tree cart_grow(const Dataset& data, const GrowParams& params) {
  for (const auto& p : data.predictors)
    if (p.kind == ColumnKind::Interval || p.kind == ColumnKind::Histogram)
      throw DataError(fmt::format("CART baseline requires point or categorical predictors; '{}' is {}",
                                  p.name, to_string(p.kind)));
  return grow(data, params);
}

}  // namespace dclass
