#pragma once

// CSV ingestion for benchmark datasets. Quoted fields and embedded commas,
// quotes, and newlines follow the usual conventions. Covariate columns that
// fail to parse as numbers are one-hot encoded, indicator columns ordered by
// category name; missing numeric values are an error, never imputed.

#include <string>
#include <vector>

#include "rcate/data.hpp"

namespace rcate {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& text);
CsvTable read_csv_file(const std::string& path);

struct CsvSchema {
  // Empty means every column not otherwise claimed is a covariate.
  std::vector<std::string> feature_columns;
  std::string treatment_column = "w";
  std::string outcome_column = "y";
  std::string propensity_column;  // empty when the file has no design column
};

struct LoadedDataset {
  Dataset data;
  // Post-encoding column names aligned with data.features; a categorical
  // column "c" with values {"a","b"} becomes "c=a", "c=b".
  std::vector<std::string> feature_names;
};

LoadedDataset dataset_from_table(const CsvTable& table, const CsvSchema& schema);
LoadedDataset load_csv(const std::string& path, const CsvSchema& schema);

// Minimal writer used for synthetic exports and result files.
std::string csv_escape(const std::string& field);

}  // namespace rcate
