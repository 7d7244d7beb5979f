#include <doctest.h>

#include <sstream>

#include "cli.hpp"
#include "dclass/dataset_io.hpp"
#include "dclass/synthgen.hpp"
#include "dclass/tree_io.hpp"
#include "test_support.hpp"
#include <algorithm>
#include <json.hpp>

using namespace dclass;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) { return (dclass::testing::temp_dir() / name).string(); }

}  // namespace

TEST_CASE("synth, train, predict, evaluate and export") {
  const auto data = tmp("cli_data.json");
  REQUIRE(run({"synth", "--n-per-class", "20", "--seed", "3", "--noise", "2", "--out", data}).code == 0);

  const auto tree_path = tmp("cli_tree.json");
  const auto trained = run({"train", "--data", data, "--alpha", "0.05", "--out", tree_path});
  REQUIRE(trained.code == 0);
  CHECK(trained.out.find("Node") != std::string::npos);
  CHECK(trained.out.find("tree error") != std::string::npos);

  const auto tree = tree_from_json(read_text_file(tree_path));
  const auto preds_path = tmp("cli_preds.csv");
  REQUIRE(run({"predict", "--tree", tree_path, "--data", data, "--out", preds_path}).code == 0);
  const auto preds = read_text_file(preds_path);
  CHECK(preds.rfind("row,truth,predicted,posterior_class0,posterior_class1\n", 0) == 0);

  const auto evaluated = run({"evaluate", "--scores", preds_path});
  REQUIRE(evaluated.code == 0);
  const auto metrics = nlohmann::json::parse(evaluated.out);
  // Predicting the training data reproduces the resubstitution error.
  CHECK(metrics["error_rate"].get<double>() == tree.resubstitution_error());
  CHECK(metrics["positive"] == "class1");

  const auto dot = run({"export", "--tree", tree_path, "--format", "dot"});
  REQUIRE(dot.code == 0);
  CHECK(dot.out.rfind("digraph", 0) == 0);
  const auto table = run({"export", "--tree", tree_path});
  CHECK(table.out == export_tree(tree, ExportFormat::Table));
}

TEST_CASE("train on a pure dataset gives one leaf") {
  const auto data = tmp("cli_pure.csv");
  write_text_file(data, "x,label\n1,a\n2,a\n3,a\n");
  const auto tree_path = tmp("cli_pure_tree.json");
  const auto r = run({"train", "--data", data, "--out", tree_path});
  CHECK(r.code == 0);
  CHECK(tree_from_json(read_text_file(tree_path)).nodes.size() == 1);
}

TEST_CASE("compare writes one row per algorithm and replication") {
  const auto data = tmp("cli_cmp.json");
  REQUIRE(run({"synth", "--n-per-class", "15", "--seed", "4", "--out", data}).code == 0);
  const auto csv = tmp("cli_runs.csv");
  REQUIRE(run({"compare", "--data", data, "--B", "3", "--seed", "42", "--out", csv}).code == 0);
  const auto text = read_text_file(csv);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 7);
  const auto summary = nlohmann::json::parse(read_text_file(tmp("cli_runs.summary.json")));
  CHECK(summary["algorithms"].size() == 7);

  const auto subset = run({"compare", "--data", data, "--B", "2", "--algorithms", "DCLASS,CART_Mean_Mean"});
  REQUIRE(subset.code == 0);
  CHECK(std::count(subset.out.begin(), subset.out.end(), '\n') == 1 + 2 * 2);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"train"}).code == cli::kExitUsage);
  CHECK(run({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);

  const auto missing = run({"train", "--data", tmp("does_not_exist.json")});
  CHECK(missing.code == cli::kExitData);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  const auto bad = tmp("cli_bad.json");
  write_text_file(bad, R"({"class_labels": ["a","b"], "predictors": [{"name":"v","kind":"interval"}],
    "rows": [{"y":"a","x":[[2.0, 1.0]]}]})");
  CHECK(run({"train", "--data", bad}).code == cli::kExitData);

  const auto data = tmp("cli_alpha.csv");
  write_text_file(data, "x,label\n1,a\n2,b\n");
  CHECK(run({"train", "--data", data, "--alpha", "1.5"}).code == cli::kExitUsage);
  CHECK(run({"compare", "--data", data, "--positive", "zzz"}).code == cli::kExitUsage);
}
