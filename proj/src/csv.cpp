#include "rcate/csv.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace rcate {

namespace {

bool parse_double(const std::string& text, double* out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size()) return false;
  *out = v;
  return true;
}

std::size_t column_index(const CsvTable& table, const std::string& name) {
  const auto it = std::find(table.columns.begin(), table.columns.end(), name);
  if (it == table.columns.end()) {
    throw std::invalid_argument("csv is missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - table.columns.begin());
}

double binary_cell(const std::string& cell, const std::string& column, std::size_t row) {
  double v = 0.0;
  if (!parse_double(cell, &v) || (v != 0.0 && v != 1.0)) {
    throw std::invalid_argument("column '" + column + "' must be 0 or 1, got '" + cell +
                                "' at row " + std::to_string(row));
  }
  return v;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any_char = false;

  auto end_field = [&] {
    record.push_back(field);
    field.clear();
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    any_char = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any_char = true;
        break;
      case ',':
        end_field();
        any_char = true;
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        any_char = true;
        break;
    }
  }
  if (quoted) throw std::invalid_argument("csv ends inside a quoted field");
  if (any_char || !field.empty() || !record.empty()) end_record();

  if (records.empty()) throw std::invalid_argument("csv has no header row");
  CsvTable table;
  table.columns = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.columns.size()) {
      throw std::invalid_argument("csv row " + std::to_string(r) + " has " +
                                  std::to_string(records[r].size()) + " fields, expected " +
                                  std::to_string(table.columns.size()));
    }
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

LoadedDataset dataset_from_table(const CsvTable& table, const CsvSchema& schema) {
  if (table.rows.empty()) throw std::invalid_argument("csv has no data rows");
  if (schema.treatment_column.empty() || schema.outcome_column.empty()) {
    throw std::invalid_argument("schema must name treatment and outcome columns");
  }

  const std::size_t w_col = column_index(table, schema.treatment_column);
  const std::size_t y_col = column_index(table, schema.outcome_column);
  const bool has_e = !schema.propensity_column.empty();
  const std::size_t e_col = has_e ? column_index(table, schema.propensity_column) : 0;

  std::vector<std::size_t> feature_cols;
  if (!schema.feature_columns.empty()) {
    for (const std::string& name : schema.feature_columns) {
      feature_cols.push_back(column_index(table, name));
    }
  } else {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c == w_col || c == y_col || (has_e && c == e_col)) continue;
      feature_cols.push_back(c);
    }
  }
  if (feature_cols.empty()) throw std::invalid_argument("no covariate columns in schema");

  const std::size_t n = table.rows.size();

  // First pass decides each column's type; a column is numeric only when
  // every cell parses.
  struct ColumnPlan {
    std::size_t source = 0;
    bool numeric = true;
    std::vector<std::string> categories;
  };
  std::vector<ColumnPlan> plans;
  for (std::size_t c : feature_cols) {
    ColumnPlan plan;
    plan.source = c;
    bool has_empty = false;
    for (std::size_t r = 0; r < n && plan.numeric; ++r) {
      const std::string& cell = table.rows[r][c];
      if (cell.empty()) {
        has_empty = true;  // type decided by the non-empty cells
        continue;
      }
      double v = 0.0;
      plan.numeric = parse_double(cell, &v);
    }
    if (plan.numeric && has_empty) {
      throw std::invalid_argument("numeric column '" + table.columns[c] +
                                  "' has missing values and imputation is not supported");
    }
    if (!plan.numeric) {
      std::set<std::string> values;
      for (std::size_t r = 0; r < n; ++r) values.insert(table.rows[r][c]);
      plan.categories.assign(values.begin(), values.end());
    }
    plans.push_back(std::move(plan));
  }

  LoadedDataset out;
  std::size_t width = 0;
  for (std::size_t k = 0; k < plans.size(); ++k) {
    const std::string& name = table.columns[plans[k].source];
    if (plans[k].numeric) {
      out.feature_names.push_back(name);
      ++width;
    } else {
      for (const std::string& value : plans[k].categories) {
        out.feature_names.push_back(name + "=" + value);
      }
      width += plans[k].categories.size();
    }
  }

  out.data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(width));
  out.data.treatment.resize(static_cast<Eigen::Index>(n));
  out.data.outcome.resize(static_cast<Eigen::Index>(n));
  if (has_e) out.data.known_propensity = Vector(static_cast<Eigen::Index>(n));

  for (std::size_t r = 0; r < n; ++r) {
    const auto er = static_cast<Eigen::Index>(r);
    const auto& row = table.rows[r];
    out.data.treatment[er] = binary_cell(row[w_col], schema.treatment_column, r);
    out.data.outcome[er] = binary_cell(row[y_col], schema.outcome_column, r);
    if (has_e) {
      double e = 0.0;
      if (!parse_double(row[e_col], &e) || !(e > 0.0 && e < 1.0)) {
        throw std::invalid_argument("column '" + schema.propensity_column +
                                    "' must lie strictly in (0, 1), got '" + row[e_col] +
                                    "' at row " + std::to_string(r));
      }
      (*out.data.known_propensity)[er] = e;
    }
    Eigen::Index col = 0;
    for (const ColumnPlan& plan : plans) {
      const std::string& cell = row[plan.source];
      if (plan.numeric) {
        double v = 0.0;
        if (!parse_double(cell, &v) || !std::isfinite(v)) {
          throw std::invalid_argument("numeric column '" + table.columns[plan.source] +
                                      "' has unusable value '" + cell + "' at row " +
                                      std::to_string(r));
        }
        out.data.features(er, col++) = v;
      } else {
        for (const std::string& value : plan.categories) {
          out.data.features(er, col++) = (cell == value) ? 1.0 : 0.0;
        }
      }
    }
  }
  out.data.name = "csv";
  out.data.validate();
  return out;
}

LoadedDataset load_csv(const std::string& path, const CsvSchema& schema) {
  return dataset_from_table(read_csv_file(path), schema);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

}  // namespace rcate
