#include "dclass/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dclass/error.hpp"

namespace dclass {

using nlohmann::json;

namespace {

std::string label_text(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number() || value.is_boolean()) return value.dump();
  throw DataError("response label must be a string or number");
}

double finite_number(const json& value, const char* what) {
  if (!value.is_number()) throw DataError(fmt::format("{} must be a number", what));
  const double x = value.get<double>();
  if (!std::isfinite(x)) throw DataError(fmt::format("{} must be finite", what));
  return x;
}

MVValue parse_cell(const json& cell) {
  if (cell.is_number()) return finite_number(cell, "point value");
  if (cell.is_string()) return Category{cell.get<std::string>()};
  if (cell.is_array()) {
    if (cell.size() != 2) throw DataError("interval cell must have exactly two bounds");
    return Interval::make(finite_number(cell[0], "interval bound"),
                          finite_number(cell[1], "interval bound"));
  }
  if (cell.is_object()) {
    if (!cell.contains("bins") || !cell.contains("freqs"))
      throw DataError("histogram cell needs \"bins\" and \"freqs\"");
    std::vector<Interval> bins;
    for (const auto& b : cell.at("bins")) {
      if (!b.is_array() || b.size() != 2) throw DataError("histogram bin must be [lo, hi]");
      bins.push_back({finite_number(b[0], "bin bound"), finite_number(b[1], "bin bound")});
    }
    std::vector<double> freqs;
    for (const auto& f : cell.at("freqs")) freqs.push_back(finite_number(f, "frequency"));
    return Histogram(std::move(bins), std::move(freqs));
  }
  throw DataError(fmt::format("unrecognized cell {}", cell.dump()));
}

json cell_to_json(const MVValue& cell) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return v;
        } else if constexpr (std::is_same_v<T, Interval>) {
          return json::array({v.lower, v.upper});
        } else if constexpr (std::is_same_v<T, Histogram>) {
          json bins = json::array();
          for (const auto& b : v.bins()) bins.push_back(json::array({b.lower, b.upper}));
          return json{{"bins", bins}, {"freqs", v.freqs()}};
        } else {
          return v.label;
        }
      },
      cell);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    fields.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Dataset parse_dataset_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("malformed JSON: {}", e.what()));
  }
  if (!doc.is_object()) throw DataError("dataset document must be a JSON object");
  for (const char* key : {"class_labels", "predictors", "rows"})
    if (!doc.contains(key)) throw DataError(fmt::format("dataset is missing \"{}\"", key));

  Dataset data;
  std::map<std::string, int> label_index;
  for (const auto& label : doc.at("class_labels")) {
    auto text_label = label_text(label);
    if (label_index.contains(text_label))
      throw DataError(fmt::format("duplicate class label '{}'", text_label));
    label_index.emplace(text_label, static_cast<int>(data.class_labels.size()));
    data.class_labels.push_back(std::move(text_label));
  }
  for (const auto& p : doc.at("predictors")) {
    if (!p.contains("name") || !p.contains("kind"))
      throw DataError("predictor entry needs \"name\" and \"kind\"");
    data.predictors.push_back(
        {p.at("name").get<std::string>(), column_kind_from_string(p.at("kind").get<std::string>())});
  }
  const auto n_pred = data.predictors.size();
  data.cells.resize(n_pred);

  std::size_t row_number = 0;
  for (const auto& row : doc.at("rows")) {
    if (!row.contains("y")) throw DataError(fmt::format("row {} is missing response \"y\"", row_number));
    if (!row.contains("x") || !row.at("x").is_array())
      throw DataError(fmt::format("row {} is missing predictor array \"x\"", row_number));
    const auto& x = row.at("x");
    if (x.size() != n_pred)
      throw DataError(fmt::format("row {} has {} cells, expected {}", row_number, x.size(), n_pred));
    const auto label = label_text(row.at("y"));
    const auto it = label_index.find(label);
    if (it == label_index.end())
      throw DataError(fmt::format("row {} has unknown class label '{}'", row_number, label));
    data.response.push_back(it->second);
    for (std::size_t p = 0; p < n_pred; ++p) {
      MVValue cell;
      try {
        cell = parse_cell(x[p]);
      } catch (const DataError& e) {
        throw DataError(fmt::format("row {}, predictor '{}': {}", row_number,
                                    data.predictors[p].name, e.what()));
      }
      if (kind_of(cell) != data.predictors[p].kind)
        throw DataError(fmt::format("row {}: predictor '{}' mixes cell kinds ({} declared, {} found)",
                                    row_number, data.predictors[p].name,
                                    to_string(data.predictors[p].kind), to_string(kind_of(cell))));
      data.cells[p].push_back(std::move(cell));
    }
    ++row_number;
  }
  data.validate();
  return data;
}

Dataset parse_dataset_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw DataError("CSV has no header");
  const auto header = split_csv_line(lines.front());
  if (header.size() < 2) throw DataError("CSV needs at least one predictor and a response column");

  Dataset data;
  const auto n_pred = header.size() - 1;
  for (std::size_t p = 0; p < n_pred; ++p) data.predictors.push_back({std::string(header[p]), ColumnKind::Point});
  data.cells.resize(n_pred);
  std::vector<std::string> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto fields = split_csv_line(lines[r]);
    if (fields.size() != header.size())
      throw DataError(fmt::format("CSV line {} has {} fields, expected {}", r + 1, fields.size(),
                                  header.size()));
    for (std::size_t p = 0; p < n_pred; ++p) {
      double value = 0.0;
      const auto f = fields[p];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(value))
        throw DataError(fmt::format("CSV line {}: '{}' is not a number (CSV input is point-only)",
                                    r + 1, f));
      data.cells[p].push_back(value);
    }
    labels.emplace_back(fields.back());
  }
  auto sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  data.class_labels = sorted;
  for (const auto& l : labels)
    data.response.push_back(
        static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), l) - sorted.begin()));
  data.validate();
  return data;
}

std::string dataset_to_json(const Dataset& data, int indent) {
  json doc;
  doc["class_labels"] = data.class_labels;
  json preds = json::array();
  for (const auto& p : data.predictors)
    preds.push_back({{"name", p.name}, {"kind", std::string(to_string(p.kind))}});
  doc["predictors"] = preds;
  json rows = json::array();
  for (std::size_t i = 0; i < data.n_objects(); ++i) {
    json x = json::array();
    for (std::size_t p = 0; p < data.n_predictors(); ++p) x.push_back(cell_to_json(data.at(i, p)));
    rows.push_back({{"y", data.class_labels[static_cast<std::size_t>(data.response[i])]}, {"x", x}});
  }
  doc["rows"] = rows;
  return doc.dump(indent);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

Dataset load_dataset(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  if (path.extension() == ".csv") return parse_dataset_csv(text);
  return parse_dataset_json(text);
}

}  // namespace dclass
