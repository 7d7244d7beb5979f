#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dclass/baselines.hpp"
#include "dclass/dataset_io.hpp"
#include "dclass/error.hpp"
#include "dclass/evaluation.hpp"
#include "dclass/synthgen.hpp"
#include "dclass/tree.hpp"
#include "dclass/tree_io.hpp"

namespace dclass::cli {

namespace {

namespace fs = std::filesystem;

struct GrowFlags {
  double alpha = 0.05;
  std::size_t max_depth = 10;
  std::size_t min_node_size = 5;
  double min_delta = 0.0;
  std::size_t min_child_size = 1;
  std::size_t max_references = 0;
  std::uint64_t seed = 0;
  bool weighted_ranks = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--alpha", alpha, "Significance level for histogram splits")->capture_default_str();
    cmd.add_option("--max-depth", max_depth, "Maximum tree depth (root = 1)")->capture_default_str();
    cmd.add_option("--min-node-size", min_node_size, "Nodes smaller than this are not split")
        ->capture_default_str();
    cmd.add_option("--min-delta", min_delta, "Minimum impurity decrease for a split")
        ->capture_default_str();
    cmd.add_option("--min-child-size", min_child_size, "Minimum size of a non-empty child")
        ->capture_default_str();
    cmd.add_option("--max-references", max_references,
                   "Cap on interval/histogram references per predictor (0 = no cap)")
        ->capture_default_str();
    cmd.add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd.add_flag("--weighted-ranks", weighted_ranks, "Weight histogram bin ranks by frequency");
  }

  GrowParams params() const {
    GrowParams p;
    p.alpha = alpha;
    p.max_depth = max_depth;
    p.min_node_size = min_node_size;
    p.min_delta = min_delta;
    p.min_child_size = min_child_size;
    if (max_references > 0) p.max_references = max_references;
    p.seed = seed;
    p.weighted_ranks = weighted_ranks;
    p.validate();
    return p;
  }
};

int positive_index(const std::vector<std::string>& labels, const std::string& positive) {
  if (positive.empty()) {
    if (labels.size() < 2) throw DataError("need at least two class labels to choose a positive class");
    return 1;
  }
  const auto it = std::find(labels.begin(), labels.end(), positive);
  if (it == labels.end()) throw UsageError(fmt::format("positive class '{}' is not a class label", positive));
  return static_cast<int>(it - labels.begin());
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_text_file(path, text);
}

std::string footer(const Tree& tree) {
  return fmt::format("root error {:.4f}, tree error {:.4f}, {} nodes, {} leaves\n", tree.root().rt,
                     tree.resubstitution_error(), tree.nodes.size(), tree.n_leaves());
}

// Re-expresses a dataset's response codes in the tree's label order.
std::vector<int> truth_in_tree_labels(const Tree& tree, const Dataset& data) {
  std::vector<int> out;
  out.reserve(data.n_objects());
  for (int y : data.response) {
    const auto& label = data.class_labels[static_cast<std::size_t>(y)];
    const auto it = std::find(tree.class_labels.begin(), tree.class_labels.end(), label);
    out.push_back(it == tree.class_labels.end() ? -1 : static_cast<int>(it - tree.class_labels.begin()));
  }
  return out;
}

std::vector<std::string_view> split_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == line.npos ? line.npos : comma - start));
    if (comma == line.npos) break;
    start = comma + 1;
  }
  return fields;
}

int cmd_train(const std::string& data_path, const std::string& out_path, const GrowFlags& flags,
              std::ostream& out) {
  const auto data = load_dataset(data_path);
  const auto tree = grow(data, flags.params());
  if (!out_path.empty()) write_text_file(out_path, tree_to_json(tree));
  out << export_tree(tree, ExportFormat::Table) << footer(tree);
  return kExitOk;
}

int cmd_predict(const std::string& tree_path, const std::string& data_path, const std::string& out_path,
                std::ostream& out) {
  const auto tree = tree_from_json(read_text_file(tree_path));
  const auto data = load_dataset(data_path);
  const auto preds = predict(tree, data);
  const auto truth = truth_in_tree_labels(tree, data);
  std::string csv = "row,truth,predicted";
  for (const auto& l : tree.class_labels) csv += ",posterior_" + l;
  csv += '\n';
  for (std::size_t i = 0; i < preds.size(); ++i) {
    csv += fmt::format("{},{},{}", i, data.class_labels[static_cast<std::size_t>(data.response[i])],
                       tree.class_labels[static_cast<std::size_t>(preds[i].label)]);
    for (double p : preds[i].posterior) csv += fmt::format(",{}", p);
    csv += '\n';
  }
  emit(out_path, csv, out);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) wrong += preds[i].label != truth[i];
  if (!out_path.empty() && out_path != "-")
    out << fmt::format("{} objects, error rate {:.4f}\n", preds.size(),
                       static_cast<double>(wrong) / static_cast<double>(preds.size()));
  return kExitOk;
}

int cmd_evaluate(const std::string& scores_path, const std::string& positive, const std::string& out_path,
                 std::ostream& out) {
  const auto text = read_text_file(scores_path);
  std::istringstream lines(text);
  std::string line;
  if (!std::getline(lines, line)) throw DataError("scores file is empty");
  const auto header = split_line(line);
  std::vector<std::string> labels;
  std::vector<std::size_t> posterior_cols;
  std::optional<std::size_t> truth_col, predicted_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "truth") truth_col = c;
    if (header[c] == "predicted") predicted_col = c;
    if (header[c].starts_with("posterior_")) {
      labels.emplace_back(header[c].substr(10));
      posterior_cols.push_back(c);
    }
  }
  if (!truth_col || !predicted_col || labels.empty())
    throw DataError("scores file needs truth, predicted and posterior_<label> columns");
  const int pos = positive_index(labels, positive);

  std::vector<ScoredPrediction> scored;
  std::vector<int> predicted, truth;
  auto code = [&](std::string_view label) {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
  };
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) throw DataError("ragged row in scores file");
    const int t = code(fields[*truth_col]);
    predicted.push_back(code(fields[*predicted_col]));
    truth.push_back(t);
    const auto score = std::stod(std::string(fields[posterior_cols[static_cast<std::size_t>(pos)]]));
    scored.push_back({score, t == pos ? 1 : 0});
  }
  if (scored.empty()) throw DataError("scores file has no rows");
  const auto a = auc(scored);
  nlohmann::json result{{"n", scored.size()},
                        {"positive", labels[static_cast<std::size_t>(pos)]},
                        {"auc", a ? nlohmann::json(*a) : nlohmann::json(nullptr)},
                        {"brier", brier(scored)},
                        {"error_rate", error_rate(predicted, truth)}};
  emit(out_path, result.dump(2) + "\n", out);
  return kExitOk;
}

int cmd_compare(const std::string& data_path, std::size_t replications, const GrowFlags& flags,
                const std::string& positive, std::size_t threads, const std::string& algorithms_arg,
                const std::string& out_path, std::string summary_path, std::ostream& out) {
  const auto data = load_dataset(data_path);
  std::vector<Algorithm> algorithms;
  if (algorithms_arg.empty()) {
    algorithms = default_algorithms();
  } else {
    std::stringstream names(algorithms_arg);
    std::string name;
    while (std::getline(names, name, ',')) {
      if (name == "DCLASS")
        algorithms.push_back({name, std::nullopt});
      else
        algorithms.push_back({name, baseline_from_name(name)});
    }
  }
  CompareOptions options;
  options.replications = replications;
  options.params = flags.params();
  options.seed = flags.seed;
  options.positive_class = positive_index(data.class_labels, positive);
  options.threads = threads;
  const auto samples = bootstrap_compare(data, algorithms, options);
  emit(out_path, metrics_to_csv(samples), out);
  if (summary_path.empty() && !out_path.empty() && out_path != "-")
    summary_path = fs::path(out_path).replace_extension(".summary.json").string();
  if (!summary_path.empty()) write_text_file(summary_path, metrics_summary_json(samples));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-type classification trees over point, interval and histogram data"};
  app.require_subcommand(1);

  GrowFlags grow_flags;
  std::string data_path, out_path, tree_path, positive, scores_path, summary_path, algorithms_arg;
  std::size_t replications = 100, threads = 1;

  auto* train = app.add_subcommand("train", "Grow a tree and print it as a table");
  train->add_option("--data", data_path, "Dataset (JSON, or CSV for point-only data)")->required();
  train->add_option("--out", out_path, "Write the tree as JSON");
  grow_flags.attach(*train);

  auto* predict_cmd = app.add_subcommand("predict", "Score a dataset with a trained tree");
  predict_cmd->add_option("--tree", tree_path, "Tree JSON")->required();
  predict_cmd->add_option("--data", data_path, "Dataset to score")->required();
  predict_cmd->add_option("--out", out_path, "Output CSV (default: standard output)");

  auto* evaluate = app.add_subcommand("evaluate", "AUC, Brier score and error rate of scored output");
  evaluate->add_option("--scores", scores_path, "CSV written by predict")->required();
  evaluate->add_option("--positive", positive, "Positive class label (default: second label)");
  evaluate->add_option("--out", out_path, "Output JSON (default: standard output)");

  auto* compare = app.add_subcommand("compare", "Bootstrap comparison of D-CLASS and CART baselines");
  compare->add_option("--data", data_path, "Dataset")->required();
  compare->add_option("--B", replications, "Bootstrap replications")->capture_default_str();
  compare->add_option("--out", out_path, "Runs CSV (default: standard output)");
  compare->add_option("--summary", summary_path, "Summary JSON (default: <out>.summary.json)");
  compare->add_option("--positive", positive, "Positive class label (default: second label)");
  compare->add_option("--threads", threads, "Worker threads")->capture_default_str();
  compare->add_option("--algorithms", algorithms_arg, "Comma-separated subset (default: all seven)");
  GrowFlags compare_flags;
  compare_flags.attach(*compare);

  GenSpec gen;
  std::string preset = "signal-in-shape";
  double hist_location0 = 0.0, hist_scale0 = 1.0, hist_location1 = 0.0, hist_scale1 = 1.0;
  std::uint64_t synth_seed = 0;
  std::size_t n_per_class = 60, noise_columns = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic mixed-type dataset");
  synth->add_option("--out", out_path, "Output dataset JSON (default: standard output)");
  synth->add_option("--preset", preset, "signal-in-shape | no-signal | custom")
      ->check(CLI::IsMember({"signal-in-shape", "no-signal", "custom"}))
      ->capture_default_str();
  synth->add_option("--n-per-class", n_per_class, "Objects per class")->capture_default_str();
  synth->add_option("--noise", noise_columns, "Extra noise columns")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Random seed")->capture_default_str();
  synth->add_option("--point-shift", gen.point_shift, "custom: class-1 point mean offset");
  synth->add_option("--interval-drift", gen.interval_drift, "custom: class-1 interval center offset");
  synth->add_option("--hist-location0", hist_location0, "custom: class-0 histogram law location");
  synth->add_option("--hist-scale0", hist_scale0, "custom: class-0 histogram law scale");
  synth->add_option("--hist-location1", hist_location1, "custom: class-1 histogram law location");
  synth->add_option("--hist-scale1", hist_scale1, "custom: class-1 histogram law scale");
  synth->add_option("--bins", gen.bins, "Histogram grid bins")->capture_default_str();
  synth->add_option("--samples", gen.samples_per_histogram, "Draws per histogram cell")
      ->capture_default_str();

  std::string format = "table";
  auto* export_cmd = app.add_subcommand("export", "Render a tree JSON as a table, DOT or JSON");
  export_cmd->add_option("--tree", tree_path, "Tree JSON")->required();
  export_cmd->add_option("--format", format, "table | dot | json")
      ->check(CLI::IsMember({"table", "dot", "json"}))
      ->capture_default_str();
  export_cmd->add_option("--out", out_path, "Output file (default: standard output)");

  std::vector<std::string> owned{"dclass"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : owned) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream message;
    app.exit(e, message, message);
    err << message.str();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(data_path, out_path, grow_flags, out);
    if (*predict_cmd) return cmd_predict(tree_path, data_path, out_path, out);
    if (*evaluate) return cmd_evaluate(scores_path, positive, out_path, out);
    if (*compare)
      return cmd_compare(data_path, replications, compare_flags, positive, threads, algorithms_arg,
                         out_path, summary_path, out);
    if (*synth) {
      GenSpec spec;
      if (preset == "signal-in-shape") {
        spec = signal_in_shape_spec(n_per_class, synth_seed);
      } else if (preset == "no-signal") {
        spec = no_signal_spec(n_per_class, std::max<std::size_t>(noise_columns, 1), synth_seed);
      } else {
        spec = gen;
        spec.n_per_class = n_per_class;
        spec.seed = synth_seed;
        spec.histogram_family[0].components = {{1.0, hist_location0, hist_scale0}};
        spec.histogram_family[1].components = {{1.0, hist_location1, hist_scale1}};
      }
      if (preset != "no-signal") spec.noise_columns = noise_columns;
      spec.bins = gen.bins;
      spec.samples_per_histogram = gen.samples_per_histogram;
      emit(out_path, dataset_to_json(generate(spec)) + "\n", out);
      return kExitOk;
    }
    if (*export_cmd) {
      const auto tree = tree_from_json(read_text_file(tree_path));
      emit(out_path, export_tree(tree, export_format_from_string(format)), out);
      return kExitOk;
    }
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace dclass::cli
