// Apache License, Version 2.0, refer to LICENSE.txt

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "massah/dataset.hpp"
#include "text.hpp"

namespace massah {
namespace {

struct ArffAttribute {
  std::string name;
  bool nominal = false;
  std::vector<std::string> values;
};

struct ArffFile {
  std::string source;
  std::string relation;
  std::vector<ArffAttribute> attributes;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;
  std::vector<std::vector<bool>> quoted;
};

// Splits `s` on `sep` honoring '...' and "..." quoting and backslash escapes.
// Quoted flags let "?" inside quotes stay a literal value.
std::vector<std::string> split_tokens(std::string_view s, char sep,
                                      std::vector<bool>* quoted,
                                      const std::string& where) {
  std::vector<std::string> out;
  std::string cur;
  bool was_quoted = false;
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && i + 1 < s.size()) {
        cur.push_back(s[++i]);
      } else if (c == quote) {
        quote = 0;
      } else {
        cur.push_back(c);
      }
    } else if (c == '\'' || c == '"') {
      quote = c;
      was_quoted = true;
    } else if (c == sep) {
      out.push_back(was_quoted ? cur : std::string(detail::trim(cur)));
      if (quoted) quoted->push_back(was_quoted);
      cur.clear();
      was_quoted = false;
    } else {
      cur.push_back(c);
    }
  }
  if (quote) throw ParseError(where + ": unterminated quote");
  out.push_back(was_quoted ? cur : std::string(detail::trim(cur)));
  if (quoted) quoted->push_back(was_quoted);
  return out;
}

// Reads one name token (possibly quoted) from the front of `rest`.
std::string take_name(std::string_view& rest, const std::string& where) {
  rest = detail::trim(rest);
  if (rest.empty()) throw ParseError(where + ": expected a name");
  std::string name;
  if (rest.front() == '\'' || rest.front() == '"') {
    const char q = rest.front();
    std::size_t i = 1;
    for (; i < rest.size() && rest[i] != q; ++i) {
      if (rest[i] == '\\' && i + 1 < rest.size()) ++i;
      name.push_back(rest[i]);
    }
    if (i >= rest.size()) throw ParseError(where + ": unterminated quoted name");
    rest.remove_prefix(i + 1);
  } else {
    std::size_t i = 0;
    while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i])) &&
           rest[i] != '{') {
      ++i;
    }
    name = std::string(rest.substr(0, i));
    rest.remove_prefix(i);
  }
  return name;
}

ArffFile read_arff(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  ArffFile file;
  file.source = path;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '%') continue;
    if (!in_data) {
      if (line.front() != '@') throw ParseError(where + ": expected a declaration");
      const auto space = line.find_first_of(" \t");
      const std::string keyword = detail::lower(line.substr(0, space));
      std::string_view rest = space == std::string_view::npos ? "" : line.substr(space);
      if (keyword == "@relation") {
        file.relation = take_name(rest, where);
      } else if (keyword == "@attribute") {
        ArffAttribute attr;
        attr.name = take_name(rest, where);
        rest = detail::trim(rest);
        if (!rest.empty() && rest.front() == '{') {
          const auto close = rest.rfind('}');
          if (close == std::string_view::npos) {
            throw ParseError(where + ": unterminated nominal value list");
          }
          attr.nominal = true;
          for (auto& v : split_tokens(rest.substr(1, close - 1), ',', nullptr, where)) {
            if (v.empty()) throw ParseError(where + ": empty nominal value");
            for (const auto& seen : attr.values) {
              if (seen == v) throw ParseError(where + ": duplicate nominal value '" + v + "'");
            }
            attr.values.push_back(std::move(v));
          }
        } else {
          std::string_view type_rest = rest;
          const std::string type = detail::lower(take_name(type_rest, where));
          if (type != "numeric" && type != "real" && type != "integer") {
            throw UnsupportedFeatureError(where + ": attribute '" + attr.name +
                                          "' has unsupported type '" + type + "'");
          }
        }
        file.attributes.push_back(std::move(attr));
      } else if (keyword == "@data") {
        in_data = true;
      } else {
        throw ParseError(where + ": unknown declaration '" + keyword + "'");
      }
      continue;
    }
    if (line.front() == '{') {
      throw UnsupportedFeatureError(where + ": sparse ARFF rows are not supported");
    }
    std::vector<bool> quoted;
    auto tokens = split_tokens(line, ',', &quoted, where);
    if (tokens.size() != file.attributes.size()) {
      throw ParseError(where + ": row has " + std::to_string(tokens.size()) +
                       " values, expected " + std::to_string(file.attributes.size()));
    }
    file.rows.push_back(std::move(tokens));
    file.quoted.push_back(std::move(quoted));
    file.row_lines.push_back(line_no);
  }
  if (!in_data) throw ParseError(path + ": no @data section");
  if (file.attributes.size() < 2) {
    throw ParseError(path + ": need at least one feature and a class attribute");
  }
  return file;
}

bool same_attributes(const ArffFile& a, const ArffFile& b) {
  if (a.attributes.size() != b.attributes.size()) return false;
  for (std::size_t i = 0; i < a.attributes.size(); ++i) {
    const auto& x = a.attributes[i];
    const auto& y = b.attributes[i];
    if (x.name != y.name || x.nominal != y.nominal || x.values != y.values) return false;
  }
  return true;
}

Dataset build(const std::vector<const ArffFile*>& files) {
  const ArffFile& first = *files.front();
  for (const auto* f : files) {
    if (!same_attributes(*f, first)) {
      throw ParseError(f->source + ": attribute declarations differ from " + first.source);
    }
  }
  const auto& attrs = first.attributes;
  std::size_t class_idx = attrs.size() - 1;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (detail::iequals(attrs[i].name, "class")) {
      class_idx = i;
      break;
    }
  }
  if (!attrs[class_idx].nominal) {
    throw UnsupportedFeatureError(first.source + ": class attribute '" +
                                  attrs[class_idx].name + "' must be nominal");
  }

  std::vector<FeatureSpec> features;
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i == class_idx) continue;
    FeatureSpec f;
    f.name = attrs[i].name;
    f.kind = attrs[i].nominal ? FeatureKind::kCategorical : FeatureKind::kNumerical;
    f.categories = attrs[i].values;
    f.missing_allowed = true;  // "?" is part of the ARFF format
    features.push_back(std::move(f));
  }

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t n_first = 0;
  for (const auto* file : files) {
    for (std::size_t r = 0; r < file->rows.size(); ++r) {
      const auto& row = file->rows[r];
      const std::string where = file->source + ":" + std::to_string(file->row_lines[r]);
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        const std::string& tok = row[i];
        const bool missing = tok == "?" && !file->quoted[r][i];
        const std::string col = "column '" + attrs[i].name + "'";
        if (i == class_idx) {
          if (missing) throw ParseError(where + ": " + col + ": missing class label");
          const auto& vals = attrs[i].values;
          const auto it = std::find(vals.begin(), vals.end(), tok);
          if (it == vals.end()) {
            throw ParseError(where + ": " + col + ": undeclared nominal value '" + tok + "'");
          }
          labels.push_back(static_cast<int>(it - vals.begin()));
          continue;
        }
        if (missing) {
          values.push_back(kMissing);
        } else if (attrs[i].nominal) {
          const auto& vals = attrs[i].values;
          const auto it = std::find(vals.begin(), vals.end(), tok);
          if (it == vals.end()) {
            throw ParseError(where + ": " + col + ": undeclared nominal value '" + tok + "'");
          }
          values.push_back(static_cast<double>(it - vals.begin()));
        } else {
          const auto num = detail::parse_number(tok);
          if (!num || !std::isfinite(*num)) {
            throw ParseError(where + ": " + col + ": expected a finite number, got '" +
                             tok + "'");
          }
          values.push_back(*num);
        }
      }
    }
    if (file == files.front()) n_first = file->rows.size();
  }

  std::optional<TrainTestSplit> split;
  if (files.size() == 2) {
    TrainTestSplit s;
    for (std::size_t i = 0; i < labels.size(); ++i) (i < n_first ? s.train : s.test).push_back(i);
    split = std::move(s);
  }
  std::string name = first.relation.empty() ? detail::dataset_name_from(first.source)
                                            : first.relation;
  return Dataset(std::move(name), std::move(features), std::move(values), std::move(labels),
                 attrs[class_idx].values, std::move(split));
}

}  // namespace

Dataset load_arff(const std::string& path) {
  const ArffFile f = read_arff(path);
  return build({&f});
}

Dataset load_arff(const std::string& train_path, const std::string& test_path) {
  const ArffFile train = read_arff(train_path);
  const ArffFile test = read_arff(test_path);
  return build({&train, &test});
}

}  // namespace massah
