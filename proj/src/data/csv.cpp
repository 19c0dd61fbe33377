// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "massah/dataset.hpp"
#include "text.hpp"

namespace massah {
namespace {

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;  // 1-based line where the record starts
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRecord> rows;
};

// RFC 4180: quoted fields may hold commas, CR/LF and "" escapes.
CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  std::size_t line = 1;
  current.line = 1;
  auto end_field = [&] {
    current.fields.push_back(field_was_quoted ? field : std::string(detail::trim(field)));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  std::size_t i = 0;
  if (text.rfind("\xEF\xBB\xBF", 0) == 0) i = 3;  // UTF-8 BOM
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!detail::trim(field).empty()) {
          throw ParseError(path + ":" + std::to_string(line) +
                           ": quote inside unquoted field");
        }
        field.clear();
        in_quotes = true;
        field_was_quoted = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(path + ": unterminated quoted field");
  if (!field.empty() || field_was_quoted || !current.fields.empty()) end_record();

  if (records.empty()) throw ParseError(path + ": missing header row");
  CsvTable table;
  table.source = path;
  table.header = std::move(records.front().fields);
  records.erase(records.begin());
  for (const auto& r : records) {
    if (r.fields.size() != table.header.size()) {
      throw ParseError(path + ":" + std::to_string(r.line) + ": ragged row (" +
                       std::to_string(r.fields.size()) + " fields, header has " +
                       std::to_string(table.header.size()) + ")");
    }
  }
  table.rows = std::move(records);
  return table;
}

std::size_t resolve_label(const std::vector<std::string>& header,
                          const ColumnRef& ref, const std::string& source) {
  if (const auto* idx = std::get_if<std::size_t>(&ref)) {
    if (*idx >= header.size()) {
      throw ParseError(source + ": label column index " + std::to_string(*idx) +
                       " out of range");
    }
    return *idx;
  }
  const auto& name = std::get<std::string>(ref);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ParseError(source + ": label column '" + name + "' missing");
  return static_cast<std::size_t>(it - header.begin());
}

bool column_allows_missing(const CsvOptions& options, const std::string& name) {
  return std::any_of(options.missing_allowed.begin(), options.missing_allowed.end(),
                     [&](const std::string& m) { return m == "*" || m == name; });
}

Dataset build(const std::vector<const CsvTable*>& tables, const CsvOptions& options) {
  const CsvTable& first = *tables.front();
  for (const auto* t : tables) {
    if (t->header != first.header) {
      throw ParseError(t->source + ": header differs from " + first.source);
    }
  }
  const auto& header = first.header;
  const std::size_t label_col = resolve_label(header, options.label_column, first.source);

  struct Cell {
    const std::string* token;
    const CsvTable* table;
    std::size_t line;
  };
  std::vector<std::vector<Cell>> rows;
  for (const auto* t : tables) {
    for (const auto& r : t->rows) {
      std::vector<Cell> cells;
      cells.reserve(r.fields.size());
      for (const auto& f : r.fields) cells.push_back({&f, t, r.line});
      rows.push_back(std::move(cells));
    }
  }

  auto where = [&](const Cell& c, std::size_t col) {
    return c.table->source + ":" + std::to_string(c.line) + ": column '" +
           header[col] + "'";
  };

  std::vector<FeatureSpec> features;
  std::vector<std::size_t> feature_cols;
  for (std::size_t col = 0; col < header.size(); ++col) {
    if (col == label_col) continue;
    FeatureSpec f;
    f.name = header[col];
    f.missing_allowed = column_allows_missing(options, f.name);
    const auto hint = options.schema_hints.find(f.name);
    bool all_numeric = true;
    for (const auto& row : rows) {
      const std::string& tok = *row[col].token;
      if (tok.empty()) {
        if (!f.missing_allowed) {
          throw ParseError(where(row[col], col) + ": empty value not allowed");
        }
        continue;
      }
      const auto num = detail::parse_number(tok);
      if (!num) {
        all_numeric = false;
      } else if (!std::isfinite(*num) &&
                 !(hint != options.schema_hints.end() &&
                   hint->second == FeatureKind::kCategorical)) {
        throw ParseError(where(row[col], col) + ": non-finite numeric token '" + tok + "'");
      }
    }
    f.kind = hint != options.schema_hints.end()
                 ? hint->second
                 : (all_numeric ? FeatureKind::kNumerical : FeatureKind::kCategorical);
    if (f.categorical()) {
      for (const auto& row : rows) {
        const std::string& tok = *row[col].token;
        if (!tok.empty() && !f.category_index(tok)) f.categories.push_back(tok);
      }
      if (f.categories.empty()) f.categories.push_back("?");
    }
    features.push_back(std::move(f));
    feature_cols.push_back(col);
  }

  std::vector<std::string> class_names;
  std::vector<int> labels;
  std::vector<double> values;
  values.reserve(rows.size() * features.size());
  for (const auto& row : rows) {
    const std::string& y = *row[label_col].token;
    if (y.empty()) throw ParseError(where(row[label_col], label_col) + ": missing label");
    auto it = std::find(class_names.begin(), class_names.end(), y);
    if (it == class_names.end()) {
      class_names.push_back(y);
      it = class_names.end() - 1;
    }
    labels.push_back(static_cast<int>(it - class_names.begin()));
    for (std::size_t k = 0; k < features.size(); ++k) {
      const std::size_t col = feature_cols[k];
      const std::string& tok = *row[col].token;
      if (tok.empty()) {
        values.push_back(kMissing);
      } else if (features[k].categorical()) {
        values.push_back(static_cast<double>(*features[k].category_index(tok)));
      } else {
        const auto num = detail::parse_number(tok);
        if (!num || !std::isfinite(*num)) {
          throw ParseError(where(row[col], col) + ": expected a finite number, got '" +
                           tok + "'");
        }
        values.push_back(*num);
      }
    }
  }

  std::optional<TrainTestSplit> split;
  if (tables.size() == 2) {
    TrainTestSplit s;
    const std::size_t n_train = tables[0]->rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) (i < n_train ? s.train : s.test).push_back(i);
    split = std::move(s);
  }
  return Dataset(detail::dataset_name_from(first.source), std::move(features),
                 std::move(values), std::move(labels), std::move(class_names),
                 std::move(split));
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& options) {
  const CsvTable t = read_csv(path);
  return build({&t}, options);
}

Dataset load_csv(const std::string& train_path, const std::string& test_path,
                 const CsvOptions& options) {
  const CsvTable train = read_csv(train_path);
  const CsvTable test = read_csv(test_path);
  return build({&train, &test}, options);
}

}  // namespace massah
