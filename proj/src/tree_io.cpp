#include "dclass/tree_io.hpp"

#include <algorithm>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "dclass/error.hpp"

namespace dclass {

using nlohmann::json;

namespace {

constexpr int kTreeFormatVersion = 1;

const char* kind_tag(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::Histogram: return "(H)";
    case ColumnKind::Interval: return "(I)";
    case ColumnKind::Categorical: return "(C)";
    case ColumnKind::Point: return "(P)";
  }
  return "(P)";
}

json histogram_json(const Histogram& h) {
  json bins = json::array();
  for (const auto& b : h.bins()) bins.push_back(json::array({b.lower, b.upper}));
  return json{{"bins", bins}, {"freqs", h.freqs()}};
}

Histogram histogram_from(const json& j) {
  std::vector<Interval> bins;
  for (const auto& b : j.at("bins")) bins.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  return Histogram(std::move(bins), j.at("freqs").get<std::vector<double>>());
}

json split_json(const SplitSpec& spec, const std::vector<Predictor>& predictors) {
  json out{{"predictor", spec.predictor}, {"predictor_name", predictors.at(spec.predictor).name}};
  std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PointCut>) {
          out["kind"] = "point";
          out["cutpoint"] = r.cutpoint;
        } else if constexpr (std::is_same_v<R, NominalSubset>) {
          out["kind"] = "nominal";
          out["left_levels"] = r.left_levels;
        } else if constexpr (std::is_same_v<R, IntervalRef>) {
          out["kind"] = "interval";
          out["reference"] = json::array({r.reference.lower, r.reference.upper});
        } else {
          out["kind"] = "histogram";
          out["reference"] = histogram_json(r.reference);
          out["alpha"] = r.alpha;
          out["weighted_ranks"] = r.weighted_ranks;
        }
      },
      spec.rule);
  out["reference_object"] = spec.reference_object ? json(*spec.reference_object) : json(nullptr);
  return out;
}

SplitSpec split_from(const json& j) {
  SplitSpec spec;
  spec.predictor = j.at("predictor").get<std::size_t>();
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "point") {
    spec.rule = PointCut{j.at("cutpoint").get<double>()};
  } else if (kind == "nominal") {
    auto levels = j.at("left_levels").get<std::vector<std::string>>();
    std::sort(levels.begin(), levels.end());
    spec.rule = NominalSubset{std::move(levels)};
  } else if (kind == "interval") {
    const auto& r = j.at("reference");
    spec.rule = IntervalRef{Interval::make(r.at(0).get<double>(), r.at(1).get<double>())};
  } else if (kind == "histogram") {
    spec.rule = HistogramRef{histogram_from(j.at("reference")), j.at("alpha").get<double>(),
                             j.value("weighted_ranks", false)};
  } else {
    throw DataError(fmt::format("unknown split kind '{}'", kind));
  }
  if (j.contains("reference_object") && !j.at("reference_object").is_null())
    spec.reference_object = j.at("reference_object").get<std::size_t>();
  return spec;
}

std::string children_text(const TreeNode& node) {
  if (node.is_leaf()) return "-";
  std::string out;
  for (const auto& c : node.children)
    if (c) out += (out.empty() ? "" : " ") + std::to_string(*c);
  return out;
}

std::string escape_dot(std::string_view text) {
  std::string out;
  for (char ch : text) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

std::string render_table(const Tree& tree) {
  std::vector<std::array<std::string, 8>> rows;
  rows.push_back({"Node", "Size", "Children", "Father", "Splitting predictor",
                  "Splitting characteristics", "Rt", "Class"});
  for (const auto& [id, node] : tree.nodes) {
    std::string predictor = "Terminal";
    std::string characteristics = "-";
    if (node.split) {
      const auto& p = tree.predictors.at(node.split->predictor);
      predictor = fmt::format("{} {}", p.name, kind_tag(p.kind));
      characteristics = split_characteristics(*node.split);
    }
    rows.push_back({std::to_string(id), std::to_string(node.size), children_text(node),
                    node.father ? std::to_string(*node.father) : "-", predictor, characteristics,
                    fmt::format("{:.2f}", node.rt),
                    tree.class_labels.at(static_cast<std::size_t>(node.assigned_class))});
  }
  std::array<std::size_t, 8> width{};
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c > 0) line += " | ";
      line += fmt::format("{:<{}}", r[c], width[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + '\n';
  }
  return out;
}

std::string render_dot(const Tree& tree) {
  std::string out = "digraph dclass_tree {\n  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const auto& [id, node] : tree.nodes) {
    std::string label = fmt::format("#{}\\nn={}  Rt={:.2f}\\nclass={}", id, node.size, node.rt,
                                    escape_dot(tree.class_labels.at(
                                        static_cast<std::size_t>(node.assigned_class))));
    if (node.split) {
      const auto& p = tree.predictors.at(node.split->predictor);
      label += fmt::format("\\n{} {}\\n{}", escape_dot(p.name), kind_tag(p.kind),
                           escape_dot(split_characteristics(*node.split)));
    }
    out += fmt::format("  n{} [label=\"{}\"{}];\n", id, label, node.is_leaf() ? ", style=rounded" : "");
  }
  for (const auto& [id, node] : tree.nodes)
    for (std::size_t b = 0; b < 3; ++b)
      if (node.children[b])
        out += fmt::format("  n{} -> n{} [label=\"{}\"];\n", id, *node.children[b],
                           to_string(static_cast<Branch>(b)));
  out += "}\n";
  return out;
}

}  // namespace

ExportFormat export_format_from_string(std::string_view text) {
  if (text == "table") return ExportFormat::Table;
  if (text == "dot") return ExportFormat::Dot;
  if (text == "json") return ExportFormat::Json;
  throw UsageError(fmt::format("unknown export format '{}'", text));
}

std::string split_characteristics(const SplitSpec& spec) {
  return std::visit(
      [](const auto& r) -> std::string {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, PointCut>) {
          return fmt::format("{:g}", r.cutpoint);
        } else if constexpr (std::is_same_v<R, NominalSubset>) {
          return fmt::format("{{{}}}", fmt::join(r.left_levels, ","));
        } else if constexpr (std::is_same_v<R, IntervalRef>) {
          return fmt::format("[{:.2f} {:.2f}]", r.reference.lower, r.reference.upper);
        } else {
          const auto s = summarize(r.reference);
          return fmt::format("{:.2f} {:.2f} {:.2f} {:.2f} {:.2f} {:.2f}", s.min, s.max, s.mean, s.sd,
                             s.skewness, s.kurtosis);
        }
      },
      spec.rule);
}

std::string tree_to_json(const Tree& tree, int indent) {
  json doc;
  doc["format"] = "dclass-tree";
  doc["version"] = kTreeFormatVersion;
  doc["class_labels"] = tree.class_labels;
  json preds = json::array();
  for (const auto& p : tree.predictors)
    preds.push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}});
  doc["predictors"] = preds;
  const auto& gp = tree.params;
  doc["params"] = {{"alpha", gp.alpha},
                   {"max_depth", gp.max_depth},
                   {"min_node_size", gp.min_node_size},
                   {"min_delta", gp.min_delta},
                   {"min_child_size", gp.min_child_size},
                   {"max_references", gp.max_references ? json(*gp.max_references) : json(nullptr)},
                   {"seed", gp.seed},
                   {"weighted_ranks", gp.weighted_ranks}};
  json nodes = json::array();
  for (const auto& [id, node] : tree.nodes) {
    json children = json::object();
    for (std::size_t b = 0; b < 3; ++b)
      if (node.children[b]) children[std::string(to_string(static_cast<Branch>(b)))] = *node.children[b];
    nodes.push_back({{"id", id},
                     {"depth", node.depth},
                     {"size", node.size},
                     {"counts", node.class_counts},
                     {"rt", node.rt},
                     {"class", tree.class_labels.at(static_cast<std::size_t>(node.assigned_class))},
                     {"split", node.split ? split_json(*node.split, tree.predictors) : json(nullptr)},
                     {"children", children},
                     {"father", node.father ? json(*node.father) : json(nullptr)}});
  }
  doc["nodes"] = nodes;
  return doc.dump(indent) + "\n";
}

Tree tree_from_json(std::string_view text) {
  try {
    const auto doc = json::parse(text);
    if (doc.value("format", "") != "dclass-tree") throw DataError("not a dclass-tree document");
    if (doc.at("version").get<int>() != kTreeFormatVersion)
      throw DataError(fmt::format("unsupported tree format version {}", doc.at("version").dump()));
    Tree tree;
    tree.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
    for (const auto& p : doc.at("predictors"))
      tree.predictors.push_back(
          {p.at("name").get<std::string>(), column_kind_from_string(p.at("kind").get<std::string>())});
    const auto& gp = doc.at("params");
    tree.params.alpha = gp.at("alpha").get<double>();
    tree.params.max_depth = gp.at("max_depth").get<std::size_t>();
    tree.params.min_node_size = gp.at("min_node_size").get<std::size_t>();
    tree.params.min_delta = gp.at("min_delta").get<double>();
    tree.params.min_child_size = gp.at("min_child_size").get<std::size_t>();
    if (!gp.at("max_references").is_null())
      tree.params.max_references = gp.at("max_references").get<std::size_t>();
    tree.params.seed = gp.at("seed").get<std::uint64_t>();
    tree.params.weighted_ranks = gp.value("weighted_ranks", false);

    for (const auto& j : doc.at("nodes")) {
      TreeNode node;
      node.id = j.at("id").get<NodeId>();
      node.depth = j.value("depth", std::size_t{1});
      node.size = j.at("size").get<std::size_t>();
      node.class_counts = j.at("counts").get<ClassCounts>();
      node.rt = j.at("rt").get<double>();
      const auto label = j.at("class").get<std::string>();
      const auto it = std::find(tree.class_labels.begin(), tree.class_labels.end(), label);
      if (it == tree.class_labels.end()) throw DataError(fmt::format("unknown class '{}'", label));
      node.assigned_class = static_cast<int>(it - tree.class_labels.begin());
      if (!j.at("split").is_null()) {
        node.split = split_from(j.at("split"));
        if (node.split->predictor >= tree.predictors.size())
          throw DataError("split refers to a missing predictor");
      }
      for (std::size_t b = 0; b < 3; ++b) {
        const std::string key(to_string(static_cast<Branch>(b)));
        if (j.at("children").contains(key)) node.children[b] = j.at("children").at(key).get<NodeId>();
      }
      if (!j.at("father").is_null()) node.father = j.at("father").get<NodeId>();
      if (node.class_counts.size() != tree.class_labels.size())
        throw DataError(fmt::format("node {} has the wrong number of class counts", node.id));
      const auto id = node.id;
      if (!tree.nodes.emplace(id, std::move(node)).second)
        throw DataError(fmt::format("duplicate node id {}", id));
    }
    if (!tree.nodes.contains(1)) throw DataError("tree has no root node");
    for (const auto& [id, node] : tree.nodes)
      for (const auto& c : node.children)
        if (c && !tree.nodes.contains(*c))
          throw DataError(fmt::format("node {} refers to missing child {}", id, *c));
    return tree;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed tree JSON: {}", e.what()));
  }
}

std::string export_tree(const Tree& tree, ExportFormat format) {
  switch (format) {
    case ExportFormat::Table: return render_table(tree);
    case ExportFormat::Dot: return render_dot(tree);
    case ExportFormat::Json: return tree_to_json(tree);
  }
  return render_table(tree);
}

}  // namespace dclass
