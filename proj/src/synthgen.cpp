#include "dclass/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "dclass/error.hpp"

namespace dclass {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One stream per (column, object) so adding columns never perturbs others.
std::mt19937_64 cell_rng(std::uint64_t seed, std::size_t column, std::size_t object) {
  return std::mt19937_64(mix(seed ^ mix(column * 0x10001ULL + 17) ^ mix(object + 0x7f4a7c15ULL)));
}

double sample(const MixtureLaw& law, std::mt19937_64& rng) {
  double total = 0.0;
  for (const auto& c : law.components) total += c.weight;
  std::uniform_real_distribution<double> pick(0.0, total);
  double u = pick(rng);
  const NormalComponent* chosen = &law.components.back();
  for (const auto& c : law.components) {
    if (u < c.weight) {
      chosen = &c;
      break;
    }
    u -= c.weight;
  }
  std::normal_distribution<double> normal(chosen->location, chosen->scale);
  return normal(rng);
}

struct Grid {
  double lower;
  double upper;
  std::size_t bins;
};

Grid grid_for(const std::array<MixtureLaw, 2>& laws, std::size_t bins) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& law : laws)
    for (const auto& c : law.components) {
      lo = std::min(lo, c.location - 4.0 * c.scale);
      hi = std::max(hi, c.location + 4.0 * c.scale);
    }
  return {lo, hi, bins};
}

Histogram binned_histogram(const MixtureLaw& law, const Grid& grid, std::size_t draws,
                           std::mt19937_64& rng) {
  const double width = (grid.upper - grid.lower) / static_cast<double>(grid.bins);
  std::vector<std::size_t> counts(grid.bins, 0);
  for (std::size_t k = 0; k < draws; ++k) {
    const double x = sample(law, rng);
    const auto raw = std::floor((x - grid.lower) / width);
    const auto bin = static_cast<std::size_t>(std::clamp(raw, 0.0, static_cast<double>(grid.bins - 1)));
    ++counts[bin];
  }
  std::size_t first = 0, last = grid.bins - 1;
  while (counts[first] == 0) ++first;
  while (counts[last] == 0) --last;
  std::vector<Interval> bins;
  std::vector<double> freqs;
  for (std::size_t b = first; b <= last; ++b) {
    bins.push_back({grid.lower + width * static_cast<double>(b),
                    b + 1 == grid.bins ? grid.upper : grid.lower + width * static_cast<double>(b + 1)});
    freqs.push_back(static_cast<double>(counts[b]) / static_cast<double>(draws));
  }
  return Histogram(std::move(bins), std::move(freqs));
}

Interval jittered_interval(double center, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> half_width(0.1, 0.5);
  const double w = half_width(rng);
  return Interval::make(center - w, center + w);
}

}  // namespace

double MixtureLaw::mean() const {
  double total = 0.0, m = 0.0;
  for (const auto& c : components) {
    total += c.weight;
    m += c.weight * c.location;
  }
  return m / total;
}

void GenSpec::validate() const {
  if (n_per_class < 1) throw UsageError("n_per_class must be at least 1");
  if (bins < 2) throw UsageError("histograms need at least 2 bins");
  if (samples_per_histogram < 1) throw UsageError("samples_per_histogram must be at least 1");
  for (const auto& law : histogram_family) {
    if (law.components.empty()) throw UsageError("histogram law needs at least one component");
    for (const auto& c : law.components)
      if (!(c.scale > 0.0) || !(c.weight > 0.0))
        throw UsageError("mixture components need positive scale and weight");
  }
  if (!include_point && !include_interval && !include_histogram && noise_columns == 0)
    throw UsageError("generator spec produces no predictors");
  if (class_labels[0] == class_labels[1]) throw UsageError("class labels must differ");
}

GenSpec signal_in_shape_spec(std::size_t n_per_class, std::uint64_t seed) {
  GenSpec spec;
  spec.n_per_class = n_per_class;
  spec.seed = seed;
  spec.histogram_family[0].components = {{1.0, 0.0, 1.0}};
  spec.histogram_family[1].components = {{0.5, -2.0, 0.25}, {0.5, 2.0, 0.25}};
  return spec;
}

GenSpec no_signal_spec(std::size_t n_per_class, std::size_t noise_columns, std::uint64_t seed) {
  GenSpec spec;
  spec.n_per_class = n_per_class;
  spec.seed = seed;
  spec.include_point = false;
  spec.include_interval = false;
  spec.include_histogram = false;
  spec.noise_columns = noise_columns;
  return spec;
}

Dataset generate(const GenSpec& spec) {
  spec.validate();
  Dataset data;
  data.class_labels = {spec.class_labels[0], spec.class_labels[1]};
  const auto n = 2 * spec.n_per_class;
  for (std::size_t i = 0; i < n; ++i) data.response.push_back(i < spec.n_per_class ? 0 : 1);

  const Grid signal_grid = grid_for(spec.histogram_family, spec.bins);
  const std::array<MixtureLaw, 2> noise_laws{};
  const Grid noise_grid = grid_for(noise_laws, spec.bins);

  std::size_t column = 0;
  auto add_column = [&](std::string name, ColumnKind kind, auto&& make_cell) {
    data.predictors.push_back({std::move(name), kind});
    std::vector<MVValue> cells;
    cells.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto rng = cell_rng(spec.seed, column, i);
      cells.push_back(make_cell(data.response[i], rng));
    }
    data.cells.push_back(std::move(cells));
    ++column;
  };

  if (spec.include_point)
    add_column("x_point", ColumnKind::Point, [&](int y, std::mt19937_64& rng) -> MVValue {
      std::normal_distribution<double> normal(y == 1 ? spec.point_shift : 0.0, 1.0);
      return normal(rng);
    });
  if (spec.include_interval)
    add_column("x_interval", ColumnKind::Interval, [&](int y, std::mt19937_64& rng) -> MVValue {
      std::normal_distribution<double> normal(y == 1 ? spec.interval_drift : 0.0, 1.0);
      const double center = normal(rng);
      return jittered_interval(center, rng);
    });
  if (spec.include_histogram)
    add_column("x_histogram", ColumnKind::Histogram, [&](int y, std::mt19937_64& rng) -> MVValue {
      return binned_histogram(spec.histogram_family[static_cast<std::size_t>(y)], signal_grid,
                              spec.samples_per_histogram, rng);
    });
  for (std::size_t k = 0; k < spec.noise_columns; ++k) {
    switch (k % 3) {
      case 0:
        add_column(fmt::format("noise_point_{}", k), ColumnKind::Point,
                   [](int, std::mt19937_64& rng) -> MVValue {
                     std::normal_distribution<double> normal(0.0, 1.0);
                     return normal(rng);
                   });
        break;
      case 1:
        add_column(fmt::format("noise_interval_{}", k), ColumnKind::Interval,
                   [](int, std::mt19937_64& rng) -> MVValue {
                     std::normal_distribution<double> normal(0.0, 1.0);
                     const double center = normal(rng);
                     return jittered_interval(center, rng);
                   });
        break;
      default:
        add_column(fmt::format("noise_histogram_{}", k), ColumnKind::Histogram,
                   [&](int, std::mt19937_64& rng) -> MVValue {
                     return binned_histogram(noise_laws[0], noise_grid, spec.samples_per_histogram, rng);
                   });
        break;
    }
  }
  data.validate();
  return data;
}

}  // namespace dclass
