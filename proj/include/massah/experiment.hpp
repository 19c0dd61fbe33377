// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "massah/bandit.hpp"
#include "massah/dataset.hpp"
#include "massah/massah.hpp"

namespace massah {

// Malformed experiment configuration; the CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- Wilcoxon signed-rank test ----

struct WilcoxonResult {
  double t = 0.0;  // min(R+, R-)
  double r_plus = 0.0;
  double r_minus = 0.0;
  std::size_t n_effective = 0;  // nonzero differences
  bool all_zero = false;
  // One-sided levels (0.05, 0.01) at which T <= the critical value.
  std::vector<double> significant_at;
};

// d = x - y; zero differences dropped; |d| ranked with average ranks for
// ties. Throws std::invalid_argument if sizes differ or are below 5.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

// Largest c with P(T <= c) <= alpha under the exact null distribution of the
// signed-rank statistic for n pairs (one-sided). nullopt when even T = 0 is
// too likely. Exact for n <= 25; normal approximation above.
std::optional<int> wilcoxon_critical_value(std::size_t n, double alpha);

// Exact P(T <= c) under the null for n pairs, n <= 60.
double wilcoxon_null_cdf(std::size_t n, int c);

// ---- Reports ----

// Minimum risk per (dataset, method); NaN marks a cell with no successful run.
struct MinMatrix {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<std::vector<double>> values;  // [dataset][method]

  std::size_t method_index(const std::string& method) const;
  std::vector<double> column(const std::string& method) const;
  friend bool operator==(const MinMatrix&, const MinMatrix&);
};

struct RunRecord {
  std::string dataset;
  std::string method;
  std::size_t run = 0;
  std::uint64_t seed = 0;
  double risk = 1.0;
  bool failed = false;
  std::string error;
  std::string algorithm;
  std::string config;  // ParamSpec-formatted description
  std::size_t evaluations = 0;
  double elapsed_seconds = 0.0;
};

struct ExperimentReport {
  std::vector<std::string> datasets;
  std::vector<std::string> methods;
  std::vector<RunRecord> runs;  // dataset-major, then method, then run index
  Budget budget;
  std::uint64_t base_seed = 0;
  std::size_t repeats = 0;
  double wall_seconds = 0.0;

  // Throws std::logic_error if a cell's aggregate disagrees with its runs.
  MinMatrix min_matrix() const;
  bool any_failed() const;
};

enum class ReportFormat { kTsv, kMarkdown };

// Tab-separated: header "dataset<TAB>method...", one row per dataset,
// shortest round-trip decimals, "NA" for empty cells.
std::string emit_tsv(const MinMatrix& m);
// Markdown table; each row's minimum is bold, ties all bold.
std::string emit_markdown(const MinMatrix& m);
std::string emit_report(const ExperimentReport& r, ReportFormat format);
// Inverse of emit_tsv; throws ParseError.
MinMatrix parse_tsv(std::string_view text);
MinMatrix load_tsv(const std::string& path);

// One line per run: dataset, method, run, seed, risk, failed, algorithm,
// evaluations, config, error.
std::string emit_runs_tsv(const ExperimentReport& r);

// ---- Experiments ----

struct DatasetSpec {
  std::string name;  // defaults to the dataset's own name
  std::string path;
  std::string test_path;      // empty: split `path`
  double test_fraction = 0.3;
  bool stratified = true;
  std::uint64_t split_seed = 0;
  std::string label = "class";  // CSV only
};

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> methods{"UCB1"};
  double tau = 0.1;
  Budget budget = Budget::evaluations(5, 150);
  std::size_t repeats = 12;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  SearchStrategy strategy = SearchStrategy::kSmbo;
  std::string out;
  std::string markdown_out;
  std::string runs_out;
  std::string trace_dir;

  // Throws ConfigError.
  void validate() const;
};

// JSON document; unknown keys are rejected. Throws ConfigError.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::string& path);

// A column of the report: a bandit policy over the whole portfolio,
// "Fixed:<algorithm>" (one learner, full budget) or "RandomSearch"
// (uniform search on one learner picked by the run seed).
struct Method {
  enum class Kind { kPolicy, kFixed, kRandomSearch };
  Kind kind = Kind::kPolicy;
  PolicyParams policy;
  std::size_t algorithm = 0;
  std::string name;
};

Method parse_method(const std::string& name, double tau = 0.1);

// Learner drawn by RandomSearch for a run seed.
std::size_t random_search_algorithm(std::uint64_t seed);

// One run of one method; failures surface as exceptions.
SearchResult run_method(const Dataset& data, const Method& method, const Budget& budget,
                        std::uint64_t seed, SearchStrategy strategy = SearchStrategy::kSmbo);

Dataset load_experiment_dataset(const DatasetSpec& spec);

// Called after each finished run, from the thread that ran it.
using RunObserver = std::function<void(const RunRecord&, const SearchResult*)>;

// Runs datasets x methods x repeats with seed = base + run index. Dataset
// loading errors propagate before any run starts; run errors are recorded.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunObserver& observer = {});

// Round-robin, one Fixed:<algorithm> column per learner, then RandomSearch.
std::vector<std::string> baseline_methods();

}  // namespace massah
