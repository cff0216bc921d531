#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modkit/data_model.hpp"

namespace modkit {

struct FactorSpec {
  std::string name;
  bool feasible = false;
};

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Generic;
};

/// Which header columns are factors and which are features. An absent
/// feature list means "all remaining columns", with Generic kind.
struct TableSchema {
  std::vector<FactorSpec> factor_columns;
  std::optional<std::vector<FeatureSpec>> feature_columns;
  char delimiter = ',';
};

/// Parses a schema from its JSON form:
///   {"factors": [{"name": "diet", "feasible": true}, "cancer"],
///    "features": "all_remaining" | [{"name": "x", "kind": "generic"}, "y"],
///    "delimiter": ","}
TableSchema schema_from_json_text(const std::string& text);
TableSchema schema_from_json_file(const std::string& path);

/// Reads a delimited table with a header row. Factor categories are
/// encoded in first-appearance order; feature cells must parse as finite
/// non-negative numbers. Error positions are 1-based file coordinates.
Dataset load_csv(const std::string& path, const TableSchema& schema);

/// Writes factors (as labels) then features, 17 significant digits, so a
/// reload through load_csv reproduces the dataset exactly.
std::string dataset_to_csv(const Dataset& ds, char delimiter = ',');
void write_dataset_csv(const Dataset& ds, const std::string& path, char delimiter = ',');

}  // namespace modkit
