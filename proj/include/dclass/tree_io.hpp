#pragma once

#include <string>
#include <string_view>

#include "dclass/tree.hpp"

namespace dclass {

enum class ExportFormat { Table, Dot, Json };

ExportFormat export_format_from_string(std::string_view text);

/// Renders a grown tree. Table rows carry node id, size, children, father,
/// splitting predictor with its kind tag, split characteristics, Rt and class.
std::string export_tree(const Tree& tree, ExportFormat format);

std::string tree_to_json(const Tree& tree, int indent = 2);
/// Loads the JSON written by tree_to_json; throws DataError on schema errors.
Tree tree_from_json(std::string_view text);

/// Split characteristics as shown in the table: the cutpoint, the reference
/// interval "[lo hi]", or Min Max Mean SD Skewness Kurtosis of a reference
/// histogram.
std::string split_characteristics(const SplitSpec& spec);

}  // namespace dclass
