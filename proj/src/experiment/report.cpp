// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "../data/text.hpp"
#include "massah/experiment.hpp"

namespace massah {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "NA";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void check_cell_text(const std::string& s) {
  if (s.find_first_of("\t\r\n") != std::string::npos) {
    throw std::invalid_argument("report labels may not contain tabs or newlines: '" + s + "'");
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

std::size_t MinMatrix::method_index(const std::string& method) const {
  const auto it = std::find(methods.begin(), methods.end(), method);
  if (it == methods.end()) throw std::invalid_argument("no column named '" + method + "'");
  return static_cast<std::size_t>(it - methods.begin());
}

std::vector<double> MinMatrix::column(const std::string& method) const {
  const std::size_t j = method_index(method);
  std::vector<double> out;
  for (const auto& row : values) out.push_back(row[j]);
  return out;
}

bool operator==(const MinMatrix& a, const MinMatrix& b) {
  if (a.datasets != b.datasets || a.methods != b.methods || a.values.size() != b.values.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (a.values[i].size() != b.values[i].size()) return false;
    for (std::size_t j = 0; j < a.values[i].size(); ++j) {
      const double x = a.values[i][j];
      const double y = b.values[i][j];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
  }
  return true;
}

MinMatrix ExperimentReport::min_matrix() const {
  MinMatrix m;
  m.datasets = datasets;
  m.methods = methods;
  m.values.assign(datasets.size(), std::vector<double>(methods.size(), NAN));
  std::vector<std::vector<std::vector<double>>> cells(
      datasets.size(), std::vector<std::vector<double>>(methods.size()));
  for (const RunRecord& r : runs) {
    const auto di = std::find(datasets.begin(), datasets.end(), r.dataset) - datasets.begin();
    const auto mi = std::find(methods.begin(), methods.end(), r.method) - methods.begin();
    if (static_cast<std::size_t>(di) == datasets.size() ||
        static_cast<std::size_t>(mi) == methods.size()) {
      throw std::logic_error("run record outside the report grid");
    }
    if (!r.failed) cells[di][mi].push_back(r.risk);
  }
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    for (std::size_t j = 0; j < methods.size(); ++j) {
      const auto& c = cells[i][j];
      if (c.empty()) continue;
      m.values[i][j] = *std::min_element(c.begin(), c.end());
      // Aggregate must be one of the raw runs and no run may undercut it.
      if (std::find(c.begin(), c.end(), m.values[i][j]) == c.end() ||
          std::any_of(c.begin(), c.end(), [&](double v) { return v < m.values[i][j]; })) {
        throw std::logic_error("aggregate minimum disagrees with raw runs");
      }
    }
  }
  return m;
}

bool ExperimentReport::any_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.failed; });
}

std::string emit_tsv(const MinMatrix& m) {
  std::string out = "dataset";
  for (const auto& name : m.methods) {
    check_cell_text(name);
    out += '\t' + name;
  }
  out += '\n';
  for (std::size_t i = 0; i < m.datasets.size(); ++i) {
    check_cell_text(m.datasets[i]);
    out += m.datasets[i];
    for (double v : m.values[i]) out += '\t' + number(v);
    out += '\n';
  }
  return out;
}

std::string emit_markdown(const MinMatrix& m) {
  std::string out = "| dataset |";
  std::string rule = "|---|";
  for (const auto& name : m.methods) {
    out += ' ' + name + " |";
    rule += "---|";
  }
  out += '\n' + rule + '\n';
  for (std::size_t i = 0; i < m.datasets.size(); ++i) {
    double lo = INFINITY;
    for (double v : m.values[i]) {
      if (!std::isnan(v)) lo = std::min(lo, v);
    }
    out += "| " + m.datasets[i] + " |";
    for (double v : m.values[i]) {
      const std::string cell = number(v);
      out += ' ' + (v == lo ? "**" + cell + "**" : cell) + " |";
    }
    out += '\n';
  }
  return out;
}

std::string emit_report(const ExperimentReport& r, ReportFormat format) {
  if (r.runs.empty()) throw std::invalid_argument("report has no runs");
  const MinMatrix m = r.min_matrix();
  return format == ReportFormat::kTsv ? emit_tsv(m) : emit_markdown(m);
}

MinMatrix parse_tsv(std::string_view text) {
  MinMatrix m;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;
    const auto cells = split_tabs(line);
    const std::string where = "report line " + std::to_string(line_no) + ": ";
    if (header) {
      if (cells.size() < 2) throw ParseError(where + "header needs a dataset column and methods");
      for (std::size_t j = 1; j < cells.size(); ++j) m.methods.emplace_back(cells[j]);
      header = false;
      continue;
    }
    if (cells.size() != m.methods.size() + 1) {
      throw ParseError(where + "expected " + std::to_string(m.methods.size() + 1) + " cells, got " +
                       std::to_string(cells.size()));
    }
    m.datasets.emplace_back(cells[0]);
    std::vector<double> row;
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const std::string_view cell = detail::trim(cells[j]);
      if (cell == "NA") {
        row.push_back(NAN);
        continue;
      }
      const auto v = detail::parse_number(cell);
      if (!v || !std::isfinite(*v)) {
        throw ParseError(where + "bad number '" + std::string(cell) + "'");
      }
      row.push_back(*v);
    }
    m.values.push_back(std::move(row));
  }
  if (header) throw ParseError("report is empty");
  return m;
}

MinMatrix load_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open report '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tsv(buf.str());
}

std::string emit_runs_tsv(const ExperimentReport& r) {
  std::string out =
      "dataset\tmethod\trun\tseed\trisk\tfailed\talgorithm\tevaluations\tconfig\terror\n";
  for (const RunRecord& x : r.runs) {
    std::string error = x.error;
    std::replace_if(error.begin(), error.end(), [](char c) { return c == '\t' || c == '\n'; }, ' ');
    out += x.dataset + '\t' + x.method + '\t' + std::to_string(x.run) + '\t' +
           std::to_string(x.seed) + '\t' + (x.failed ? "NA" : number(x.risk)) + '\t' +
           (x.failed ? "1" : "0") + '\t' + x.algorithm + '\t' + std::to_string(x.evaluations) +
           '\t' + x.config + '\t' + error + '\n';
  }
  return out;
}

}  // namespace massah
