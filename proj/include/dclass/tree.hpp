#pragma once

// Recursive growth of mixed binary/ternary classification trees.
//
// Nodes are numbered so that the children of node f are 3(f-1)+2, +3, +4
// (left, center, right). Binary point splits use the first two slots, and a
// branch that receives no objects keeps its id reserved without a node.

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dclass/mvv.hpp"
#include "dclass/splitter.hpp"

namespace dclass {

using NodeId = std::uint64_t;

inline constexpr std::size_t kMaxTreeDepth = 39;

struct GrowParams {
  double alpha = 0.05;
  std::size_t max_depth = 10;
  std::size_t min_node_size = 5;
  double min_delta = 0.0;
  std::size_t min_child_size = 1;
  std::optional<std::size_t> max_references;
  std::uint64_t seed = 0;
  bool weighted_ranks = false;

  /// Throws UsageError on out-of-range values.
  void validate() const;

  friend bool operator==(const GrowParams&, const GrowParams&) = default;
};

/// 3(father − 1) + offset; offsets are {2, 3, 4} for ternary splits and
/// {2, 3} (left, right) for binary ones.
NodeId child_id(NodeId father, Branch branch, bool ternary = true);
/// Inverse of child_id for any non-root node.
NodeId father_id(NodeId node);

struct TreeNode {
  NodeId id = 1;
  std::size_t depth = 1;
  std::size_t size = 0;
  ClassCounts class_counts;
  double rt = 0.0;
  int assigned_class = 0;
  std::optional<SplitSpec> split;
  std::array<std::optional<NodeId>, 3> children;
  std::optional<NodeId> father;

  bool is_leaf() const noexcept { return !split.has_value(); }
  std::optional<NodeId> child(Branch b) const noexcept { return children[static_cast<std::size_t>(b)]; }
};

struct Tree {
  std::map<NodeId, TreeNode> nodes;
  GrowParams params;
  std::vector<std::string> class_labels;
  std::vector<Predictor> predictors;

  const TreeNode& root() const { return nodes.at(1); }
  const TreeNode& node(NodeId id) const { return nodes.at(id); }
  std::size_t n_leaves() const;
  std::size_t depth() const;

  /// Size-weighted mean of leaf Rt, i.e. training misclassification rate.
  double resubstitution_error() const;
};

/// Within-node misclassification ratio 1 − max(counts)/size.
double misclassification_ratio(std::span<const std::size_t> class_counts);
/// Majority class, ties resolved toward the earlier label.
int majority_class(std::span<const std::size_t> class_counts);

Tree grow(const Dataset& data, const GrowParams& params = {});

struct Prediction {
  int label = 0;
  std::vector<double> posterior;
  NodeId node = 1;
};

/// Routes one object from the root. A branch without a trained child stops at
/// the current node. Throws DataError when the row does not match the schema.
Prediction predict(const Tree& tree, std::span<const MVValue> row);
std::vector<Prediction> predict(const Tree& tree, const Dataset& data);

}  // namespace dclass
