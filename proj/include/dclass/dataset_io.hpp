#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dclass/mvv.hpp"

namespace dclass {

/// Parses the JSON dataset document:
///   {"class_labels": [...],
///    "predictors": [{"name": str, "kind": "point"|"interval"|"histogram"|"categorical"}],
///    "rows": [{"y": label, "x": [cell, ...]}]}
/// A cell is a number, a [lo, hi] pair, a string, or {"bins": [[lo, hi], ...], "freqs": [...]}.
Dataset parse_dataset_json(std::string_view text);

/// All-point CSV: header row, numeric predictor columns, response in the last
/// column. Class labels are the sorted distinct response values.
Dataset parse_dataset_csv(std::string_view text);

/// Inverse of parse_dataset_json; doubles are written round-trip exact.
std::string dataset_to_json(const Dataset& data, int indent = -1);

/// Dispatches on extension: ".csv" reads CSV, anything else JSON.
Dataset load_dataset(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace dclass
