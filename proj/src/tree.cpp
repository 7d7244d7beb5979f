#include "dclass/tree.hpp"

#include <algorithm>
#include <numeric>

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

class Grower {
 public:
  Grower(const Dataset& data, const GrowParams& params)
      : data_(data), params_(params), context_(data, params.weighted_ranks) {}

  Tree run() {
    Tree tree;
    tree.params = params_;
    tree.class_labels = data_.class_labels;
    tree.predictors = data_.predictors;
    std::vector<std::size_t> rows(data_.n_objects());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    grow_node(tree, 1, 1, std::nullopt, rows);
    return tree;
  }

 private:
  void grow_node(Tree& tree, NodeId id, std::size_t depth, std::optional<NodeId> father,
                 const std::vector<std::size_t>& rows) {
    TreeNode node;
    node.id = id;
    node.depth = depth;
    node.father = father;
    node.size = rows.size();
    node.class_counts.assign(data_.n_classes(), 0);
    for (auto i : rows) ++node.class_counts[static_cast<std::size_t>(data_.response[i])];
    node.rt = misclassification_ratio(node.class_counts);
    node.assigned_class = majority_class(node.class_counts);

    const bool pure = node.rt == 0.0;
    std::optional<CandidateScore> best;
    if (!pure && rows.size() >= params_.min_node_size && depth < params_.max_depth) {
      SplitOptions options;
      options.alpha = params_.alpha;
      options.min_child_size = params_.min_child_size;
      options.weighted_ranks = params_.weighted_ranks;
      options.max_references = params_.max_references;
      options.seed = mix(params_.seed ^ mix(id));
      best = best_split(rows, context_, options);
      if (best && best->delta < params_.min_delta) best.reset();
    }

    if (!best) {
      tree.nodes.emplace(id, std::move(node));
      return;
    }

    std::array<std::vector<std::size_t>, 3> branch_rows;
    for (auto i : rows) branch_rows[static_cast<std::size_t>(route_row(best->spec, i))].push_back(i);

    const bool ternary = best->spec.ternary();
    for (std::size_t b = 0; b < 3; ++b)
      if (!branch_rows[b].empty())
        node.children[b] = child_id(id, static_cast<Branch>(b), ternary);
    node.split = std::move(best->spec);
    const auto children = node.children;
    tree.nodes.emplace(id, std::move(node));

    for (std::size_t b = 0; b < 3; ++b)
      if (children[b]) grow_node(tree, *children[b], depth + 1, id, branch_rows[b]);
  }

  Branch route_row(const SplitSpec& spec, std::size_t row) const {
    if (const auto* h = std::get_if<HistogramRef>(&spec.rule); h && spec.reference_object)
      return route_rank_samples(context_.rank_sample(spec.predictor, row),
                                context_.rank_sample(spec.predictor, *spec.reference_object),
                                h->alpha);
    return route(spec.rule, data_.cells[spec.predictor][row]);
  }

  const Dataset& data_;
  const GrowParams& params_;
  SplitContext context_;
};

}  // namespace

void GrowParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError(fmt::format("alpha must lie in (0,1), got {}", alpha));
  if (max_depth < 1 || max_depth > kMaxTreeDepth)
    throw UsageError(fmt::format("max_depth must lie in [1, {}], got {}", kMaxTreeDepth, max_depth));
  if (min_node_size < 1) throw UsageError("min_node_size must be at least 1");
  if (min_child_size < 1) throw UsageError("min_child_size must be at least 1");
  if (!(min_delta >= 0.0)) throw UsageError("min_delta must be non-negative");
  if (max_references && *max_references < 1) throw UsageError("max_references must be at least 1");
}

NodeId child_id(NodeId father, Branch branch, bool ternary) {
  if (father < 1) throw UsageError("node ids start at 1");
  NodeId offset = 2;
  switch (branch) {
    case Branch::Left: offset = 2; break;
    case Branch::Center:
      if (!ternary) throw UsageError("binary splits have no center branch");
      offset = 3;
      break;
    case Branch::Right: offset = ternary ? 4 : 3; break;
  }
  return 3 * (father - 1) + offset;
}

NodeId father_id(NodeId node) {
  if (node < 2) throw UsageError("the root has no father");
  return (node - 2) / 3 + 1;
}

std::size_t Tree::n_leaves() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const auto& kv) { return kv.second.is_leaf(); }));
}

std::size_t Tree::depth() const {
  std::size_t d = 0;
  for (const auto& [id, node] : nodes) d = std::max(d, node.depth);
  return d;
}

double Tree::resubstitution_error() const {
  std::size_t errors = 0;
  for (const auto& [id, node] : nodes)
    if (node.is_leaf())
      errors += node.size - node.class_counts[static_cast<std::size_t>(node.assigned_class)];
  return static_cast<double>(errors) / static_cast<double>(root().size);
}

double misclassification_ratio(std::span<const std::size_t> class_counts) {
  const auto n = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  if (n == 0) return 0.0;
  const auto top = *std::max_element(class_counts.begin(), class_counts.end());
  return 1.0 - static_cast<double>(top) / static_cast<double>(n);
}

int majority_class(std::span<const std::size_t> class_counts) {
  // max_element returns the first maximum.
  return static_cast<int>(std::max_element(class_counts.begin(), class_counts.end()) -
                          class_counts.begin());
}

Tree grow(const Dataset& data, const GrowParams& params) {
  params.validate();
  if (data.n_objects() == 0) throw DataError("cannot grow a tree on an empty dataset");
  data.validate();
  return Grower(data, params).run();
}

Prediction predict(const Tree& tree, std::span<const MVValue> row) {
  if (row.size() != tree.predictors.size())
    throw DataError(fmt::format("object has {} predictors, tree expects {}", row.size(),
                                tree.predictors.size()));
  for (std::size_t p = 0; p < row.size(); ++p)
    if (kind_of(row[p]) != tree.predictors[p].kind)
      throw DataError(fmt::format("predictor '{}' expects {} values", tree.predictors[p].name,
                                  to_string(tree.predictors[p].kind)));

  const TreeNode* node = &tree.root();
  while (node->split) {
    const auto branch = route(node->split->rule, row[node->split->predictor]);
    const auto next = node->child(branch);
    if (!next) break;
    node = &tree.node(*next);
  }
  Prediction out;
  out.node = node->id;
  out.label = node->assigned_class;
  out.posterior.reserve(node->class_counts.size());
  for (auto c : node->class_counts)
    out.posterior.push_back(static_cast<double>(c) / static_cast<double>(node->size));
  return out;
}

std::vector<Prediction> predict(const Tree& tree, const Dataset& data) {
  std::vector<Prediction> out;
  out.reserve(data.n_objects());
  std::vector<MVValue> row;
  for (std::size_t i = 0; i < data.n_objects(); ++i) {
    row = data.row(i);
    out.push_back(predict(tree, row));
  }
  return out;
}

}  // namespace dclass
