#pragma once

// Classifier quality metrics and the bootstrap comparison harness.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dclass/baselines.hpp"
#include "dclass/mvv.hpp"
#include "dclass/tree.hpp"

namespace dclass {

/// Posterior probability of the positive class and the 0/1 truth.
struct ScoredPrediction {
  double score = 0.0;
  int truth = 0;
};

/// Mann-Whitney form: P(score_pos > score_neg) + 0.5 P(tie). Absent when
/// either class is missing.
std::optional<double> auc(std::span<const ScoredPrediction> preds);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

/// Empirical ROC curve from (0,0) to (1,1), one vertex per distinct score.
std::vector<RocPoint> roc_curve(std::span<const ScoredPrediction> preds);
/// Trapezoidal area under roc_curve; absent for single-class input.
std::optional<double> roc_trapezoid_auc(std::span<const ScoredPrediction> preds);

/// Mean of (score − truth)². Throws UsageError on empty input.
double brier(std::span<const ScoredPrediction> preds);

/// Fraction of mismatching labels. Throws UsageError on length mismatch or
/// empty input.
double error_rate(std::span<const int> predicted, std::span<const int> truth);

/// One competitor in a comparison: D-CLASS when `baseline` is empty.
struct Algorithm {
  std::string name;
  std::optional<BaselineSpec> baseline;
};

/// "DCLASS" followed by the six CART baselines.
std::vector<Algorithm> default_algorithms();

struct MetricSample {
  std::string algorithm;
  std::size_t replication = 0;
  std::optional<double> auc;
  std::optional<double> brier;
  std::optional<double> error_rate;
};

struct CompareOptions {
  std::size_t replications = 100;
  GrowParams params;
  std::uint64_t seed = 0;
  /// Index into class_labels of the positive class.
  int positive_class = 1;
  /// Worker threads; results do not depend on this.
  std::size_t threads = 1;
};

/// Trains each algorithm on its own bootstrap sample per replication and
/// scores it on that sample's out-of-bag rows. Rows are ordered by
/// replication, then algorithm.
std::vector<MetricSample> bootstrap_compare(const Dataset& data, std::span<const Algorithm> algorithms,
                                            const CompareOptions& options);

/// Header "algorithm,replication,auc,brier,error_rate"; absent values empty.
std::string metrics_to_csv(std::span<const MetricSample> samples);

/// Per-algorithm median, quartiles and IQR of each metric, skipping absent values.
std::string metrics_summary_json(std::span<const MetricSample> samples);

/// Linear-interpolation quantile (q in [0,1]) of unsorted values.
double quantile(std::vector<double> values, double q);

/// Positive-class scores of a tree over a dataset, labelled against `positive_class`.
std::vector<ScoredPrediction> score_dataset(const Tree& tree, const Dataset& data, int positive_class);

}  // namespace dclass
