#include "dclass/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "dclass/error.hpp"

namespace dclass {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication, std::size_t algorithm) {
  return mix(seed ^ mix(static_cast<std::uint64_t>(replication) ^ mix(algorithm + 0x51ed27ULL)));
}

std::string optional_field(const std::optional<double>& v) {
  return v ? fmt::format("{}", *v) : std::string();
}

MetricSample run_replication(const Dataset& data, const Algorithm& algorithm,
                             std::size_t replication, std::size_t algorithm_index,
                             const CompareOptions& options) {
  MetricSample out;
  out.algorithm = algorithm.name;
  out.replication = replication;

  const auto n = data.n_objects();
  const auto seed = replication_seed(options.seed, replication, algorithm_index);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> draw(0, n - 1);
  std::vector<std::size_t> in_bag(n);
  std::vector<bool> drawn(n, false);
  for (auto& i : in_bag) {
    i = draw(rng);
    drawn[i] = true;
  }
  std::vector<std::size_t> oob;
  for (std::size_t i = 0; i < n; ++i)
    if (!drawn[i]) oob.push_back(i);
  if (oob.empty()) return out;

  auto params = options.params;
  params.seed = mix(seed);
  const auto train = data.subset(in_bag);
  const auto tree = algorithm.baseline ? cart_grow(train, params) : grow(train, params);

  const auto test = data.subset(oob);
  const auto preds = predict(tree, test);
  std::vector<ScoredPrediction> scored;
  std::vector<int> labels;
  scored.reserve(preds.size());
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const auto pc = static_cast<std::size_t>(options.positive_class);
    scored.push_back({preds[k].posterior[pc], test.response[k] == options.positive_class ? 1 : 0});
    labels.push_back(preds[k].label);
  }
  out.auc = auc(scored);
  out.brier = brier(scored);
  out.error_rate = error_rate(labels, test.response);
  return out;
}

}  // namespace

std::optional<double> auc(std::span<const ScoredPrediction> preds) {
  std::vector<std::pair<double, int>> sorted;
  sorted.reserve(preds.size());
  for (const auto& p : preds) sorted.emplace_back(p.score, p.truth);
  std::sort(sorted.begin(), sorted.end());
  double n_pos = 0.0;
  double rank_sum = 0.0;
  for (std::size_t k = 0; k < sorted.size();) {
    std::size_t end = k;
    double pos_in_group = 0.0;
    while (end < sorted.size() && sorted[end].first == sorted[k].first) {
      if (sorted[end].second == 1) pos_in_group += 1.0;
      ++end;
    }
    const double mid_rank = (static_cast<double>(k + 1) + static_cast<double>(end)) / 2.0;
    rank_sum += pos_in_group * mid_rank;
    n_pos += pos_in_group;
    k = end;
  }
  const double n_neg = static_cast<double>(sorted.size()) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) return std::nullopt;
  return (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(std::span<const ScoredPrediction> preds) {
  std::vector<ScoredPrediction> sorted(preds.begin(), preds.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.score > b.score; });
  double total_pos = 0.0, total_neg = 0.0;
  for (const auto& p : sorted) (p.truth == 1 ? total_pos : total_neg) += 1.0;
  std::vector<RocPoint> curve{{0.0, 0.0}};
  if (total_pos == 0.0 || total_neg == 0.0) return curve;
  double tp = 0.0, fp = 0.0;
  for (std::size_t k = 0; k < sorted.size();) {
    const double threshold = sorted[k].score;
    while (k < sorted.size() && sorted[k].score == threshold) {
      (sorted[k].truth == 1 ? tp : fp) += 1.0;
      ++k;
    }
    curve.push_back({fp / total_neg, tp / total_pos});
  }
  return curve;
}

std::optional<double> roc_trapezoid_auc(std::span<const ScoredPrediction> preds) {
  const auto curve = roc_curve(preds);
  if (curve.size() < 2) return std::nullopt;
  double area = 0.0;
  for (std::size_t k = 1; k < curve.size(); ++k)
    area += (curve[k].fpr - curve[k - 1].fpr) * (curve[k].tpr + curve[k - 1].tpr) / 2.0;
  return area;
}

double brier(std::span<const ScoredPrediction> preds) {
  if (preds.empty()) throw UsageError("brier score of an empty prediction set");
  double sum = 0.0;
  for (const auto& p : preds) {
    const double d = p.score - static_cast<double>(p.truth);
    sum += d * d;
  }
  return sum / static_cast<double>(preds.size());
}

double error_rate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size())
    throw UsageError(fmt::format("label vectors differ in length ({} vs {})", predicted.size(),
                                 truth.size()));
  if (predicted.empty()) throw UsageError("error rate of an empty label set");
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < predicted.size(); ++k) wrong += predicted[k] != truth[k];
  return static_cast<double>(wrong) / static_cast<double>(predicted.size());
}

std::vector<Algorithm> default_algorithms() {
  std::vector<Algorithm> out{{"DCLASS", std::nullopt}};
  for (const auto& b : all_baselines()) out.push_back({b.name(), b});
  return out;
}

std::vector<MetricSample> bootstrap_compare(const Dataset& data, std::span<const Algorithm> algorithms,
                                            const CompareOptions& options) {
  if (options.replications < 1) throw UsageError("at least one bootstrap replication is required");
  options.params.validate();
  data.validate();
  if (options.positive_class < 0 || static_cast<std::size_t>(options.positive_class) >= data.n_classes())
    throw UsageError(fmt::format("positive class index {} out of range", options.positive_class));
  {
    const auto counts = data.class_counts();
    if (std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) < 2)
      throw DataError("bootstrap comparison needs at least two observed classes");
  }

  std::vector<Dataset> inputs;
  inputs.reserve(algorithms.size());
  for (const auto& a : algorithms) inputs.push_back(a.baseline ? preprocess(data, *a.baseline) : data);

  const auto n_alg = algorithms.size();
  const auto n_tasks = options.replications * n_alg;
  std::vector<MetricSample> results(n_tasks);
  std::vector<std::exception_ptr> failures(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1)) {
      const auto b = task / n_alg;
      const auto a = task % n_alg;
      try {
        results[task] = run_replication(inputs[a], algorithms[a], b, a, options);
      } catch (...) {
        failures[task] = std::current_exception();
      }
    }
  };
  const auto n_threads = std::clamp<std::size_t>(options.threads, 1, n_tasks);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return results;
}

std::string metrics_to_csv(std::span<const MetricSample> samples) {
  std::string out = "algorithm,replication,auc,brier,error_rate\n";
  for (const auto& s : samples)
    out += fmt::format("{},{},{},{},{}\n", s.algorithm, s.replication, optional_field(s.auc),
                       optional_field(s.brier), optional_field(s.error_rate));
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string metrics_summary_json(std::span<const MetricSample> samples) {
  using nlohmann::json;
  std::vector<std::string> order;
  std::map<std::string, std::array<std::vector<double>, 3>> values;
  std::map<std::string, std::array<std::size_t, 3>> absent;
  std::map<std::string, std::size_t> rows;
  for (const auto& s : samples) {
    if (!rows.contains(s.algorithm)) order.push_back(s.algorithm);
    ++rows[s.algorithm];
    const std::array<const std::optional<double>*, 3> metrics{&s.auc, &s.brier, &s.error_rate};
    for (std::size_t m = 0; m < 3; ++m) {
      if (*metrics[m])
        values[s.algorithm][m].push_back(**metrics[m]);
      else
        ++absent[s.algorithm][m];
    }
  }
  static constexpr std::array<const char*, 3> kNames{"auc", "brier", "error_rate"};
  json out = json::array();
  for (const auto& name : order) {
    json entry{{"algorithm", name}, {"replications", rows[name]}};
    for (std::size_t m = 0; m < 3; ++m) {
      const auto& v = values[name][m];
      json stats{{"n", v.size()}, {"absent", absent[name][m]}};
      if (!v.empty()) {
        const double q1 = quantile(v, 0.25), q3 = quantile(v, 0.75);
        stats["median"] = quantile(v, 0.5);
        stats["q1"] = q1;
        stats["q3"] = q3;
        stats["iqr"] = q3 - q1;
        stats["mean"] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
      }
      entry[kNames[m]] = stats;
    }
    out.push_back(entry);
  }
  return json{{"algorithms", out}}.dump(2) + "\n";
}

std::vector<ScoredPrediction> score_dataset(const Tree& tree, const Dataset& data, int positive_class) {
  const auto preds = predict(tree, data);
  std::vector<ScoredPrediction> out;
  out.reserve(preds.size());
  for (std::size_t k = 0; k < preds.size(); ++k)
    out.push_back({preds[k].posterior.at(static_cast<std::size_t>(positive_class)),
                   data.response[k] == positive_class ? 1 : 0});
  return out;
}

}  // namespace dclass
