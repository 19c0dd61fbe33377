// Apache License, Version 2.0, refer to LICENSE.txt

// Command-line front end: run, baselines, compare, report.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "massah/experiment.hpp"

namespace {

using namespace massah;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

// Flags shared by `run` and `baselines`; unset flags leave the config alone.
struct RunFlags {
  std::string config;
  std::vector<std::string> datasets;
  std::vector<std::string> test_sets;
  std::vector<std::string> policies;
  std::optional<std::string> reward;
  std::optional<std::string> budget_mode;
  std::optional<double> quantum;
  std::optional<double> total;
  std::optional<std::size_t> repeats;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<double> tau;
  std::optional<double> test_fraction;
  std::optional<std::string> strategy;
  std::optional<std::string> out;
  std::optional<std::string> markdown;
  std::optional<std::string> runs;
  std::optional<std::string> trace_dir;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool with_policy) {
  app->add_option("--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--dataset", f.datasets, "dataset file (.arff or .csv); repeatable");
  app->add_option("--test-set", f.test_sets, "test file paired with the --dataset at the same position");
  if (with_policy) {
    app->add_option("--policy", f.policies,
                    "UCB1, <eps>-greedy, Softmax, RoundRobin, Fixed:<learner>, RandomSearch; "
                    "suffix _E(Q) selects the expectation reward; repeatable");
    app->add_option("--reward", f.reward, "reward for every bandit policy")
        ->check(CLI::IsMember({"naive", "expectation"}));
  }
  app->add_option("--budget-mode", f.budget_mode)->check(CLI::IsMember({"evaluations", "wallclock"}));
  app->add_option("--quantum", f.quantum, "per-play budget t");
  app->add_option("--total-budget", f.total, "global budget T");
  app->add_option("--repeats", f.repeats);
  app->add_option("--seed", f.seed, "base seed; run k uses seed + k");
  app->add_option("--jobs", f.jobs, "concurrent runs");
  app->add_option("--tau", f.tau, "softmax temperature");
  app->add_option("--test-fraction", f.test_fraction, "held-out share when no --test-set is given");
  app->add_option("--strategy", f.strategy)->check(CLI::IsMember({"smbo", "random"}));
  app->add_option("--out", f.out, "TSV report path (default: stdout)");
  app->add_option("--markdown", f.markdown, "markdown report path");
  app->add_option("--runs", f.runs, "per-run TSV path");
  app->add_option("--trace-dir", f.trace_dir, "directory for per-run JSONL traces");
}

std::string with_reward(std::string method, const std::string& reward) {
  const Method m = parse_method(method);
  if (m.kind != Method::Kind::kPolicy || m.policy.policy == PolicyKind::kRoundRobin) return method;
  const std::string suffix = "_E(Q)";
  if (method.ends_with(suffix)) method.resize(method.size() - suffix.size());
  return reward == "expectation" ? method + suffix : method;
}

ExperimentConfig build_config(const RunFlags& f, const std::vector<std::string>* methods) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (!f.datasets.empty()) {
    if (!f.test_sets.empty() && f.test_sets.size() != f.datasets.size()) {
      throw ConfigError("--test-set must be given once per --dataset or not at all");
    }
    cfg.datasets.clear();
    for (std::size_t i = 0; i < f.datasets.size(); ++i) {
      DatasetSpec d;
      d.path = f.datasets[i];
      if (!f.test_sets.empty()) d.test_path = f.test_sets[i];
      cfg.datasets.push_back(d);
    }
  } else if (!f.test_sets.empty()) {
    throw ConfigError("--test-set requires --dataset");
  }
  if (f.test_fraction) {
    for (auto& d : cfg.datasets) d.test_fraction = *f.test_fraction;
  }
  if (methods) {
    cfg.methods = *methods;
  } else if (!f.policies.empty()) {
    cfg.methods = f.policies;
  }
  if (f.reward) {
    for (auto& m : cfg.methods) m = with_reward(m, *f.reward);
  }
  if (f.budget_mode) {
    cfg.budget.mode = *f.budget_mode == "wallclock" ? BudgetMode::kWallClock : BudgetMode::kEvaluations;
  }
  if (f.quantum) cfg.budget.quantum = *f.quantum;
  if (f.total) cfg.budget.total = *f.total;
  if (f.repeats) cfg.repeats = *f.repeats;
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs;
  if (f.tau) cfg.tau = *f.tau;
  if (f.strategy) cfg.strategy = *f.strategy == "random" ? SearchStrategy::kRandom : SearchStrategy::kSmbo;
  if (f.out) cfg.out = *f.out;
  if (f.markdown) cfg.markdown_out = *f.markdown;
  if (f.runs) cfg.runs_out = *f.runs;
  if (f.trace_dir) cfg.trace_dir = *f.trace_dir;
  cfg.validate();
  return cfg;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string file_safe(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-') c = '_';
  }
  return s;
}

int do_run(const ExperimentConfig& cfg) {
  if (!cfg.trace_dir.empty()) std::filesystem::create_directories(cfg.trace_dir);
  const ExperimentReport report = run_experiment(cfg, [&](const RunRecord& r, const SearchResult* s) {
    std::cerr << r.dataset << ' ' << r.method << " run " << r.run << ": ";
    if (r.failed) {
      std::cerr << "FAILED " << r.error << '\n';
    } else {
      std::cerr << "risk " << r.risk << " (" << r.algorithm << ")\n";
    }
    if (s && !cfg.trace_dir.empty()) {
      std::ofstream out(std::filesystem::path(cfg.trace_dir) /
                        (file_safe(r.dataset) + "__" + file_safe(r.method) + "__" +
                         std::to_string(r.run) + ".jsonl"));
      write_trace(out, *s);
    }
  });
  const std::string tsv = emit_report(report, ReportFormat::kTsv);
  if (cfg.out.empty()) {
    std::cout << tsv;
  } else {
    write_file(cfg.out, tsv);
  }
  if (!cfg.markdown_out.empty()) write_file(cfg.markdown_out, emit_report(report, ReportFormat::kMarkdown));
  if (!cfg.runs_out.empty()) write_file(cfg.runs_out, emit_runs_tsv(report));
  return report.any_failed() ? kExitRuntime : kExitOk;
}

struct CompareFlags {
  std::string report;
  std::string against;
  std::string column_a = "AutoWEKA";
  std::string column_b = "UCB1";
};

int do_compare(const CompareFlags& f) {
  const MinMatrix a = load_tsv(f.report);
  const MinMatrix b = f.against.empty() ? a : load_tsv(f.against);
  const auto col_a = a.column(f.column_a);
  const auto col_b = b.column(f.column_b);
  std::vector<double> x, y;
  std::vector<std::string> used;
  for (std::size_t i = 0; i < a.datasets.size(); ++i) {
    const auto it = std::find(b.datasets.begin(), b.datasets.end(), a.datasets[i]);
    if (it == b.datasets.end()) continue;
    const double va = col_a[i];
    const double vb = col_b[static_cast<std::size_t>(it - b.datasets.begin())];
    if (std::isnan(va) || std::isnan(vb)) continue;
    x.push_back(va);
    y.push_back(vb);
    used.push_back(a.datasets[i]);
  }
  const WilcoxonResult r = wilcoxon_signed_rank(x, y);
  std::cout << "pairs\t" << x.size() << "\nn_effective\t" << r.n_effective << "\nR+\t" << r.r_plus
            << "\nR-\t" << r.r_minus << "\nT\t" << r.t << '\n';
  for (double level : {0.05, 0.01}) {
    const auto crit = wilcoxon_critical_value(r.n_effective, level);
    std::cout << "critical_" << level << '\t' << (crit ? std::to_string(*crit) : "NA") << '\t'
              << (crit && r.t <= *crit ? "significant" : "not significant") << '\n';
  }
  if (r.all_zero) std::cout << "note\tall differences are zero\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MASSAH: bandit-driven algorithm selection and hyperparameter optimization"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run bandit policies over the learner portfolio");
  add_run_flags(run, run_flags, true);

  RunFlags base_flags;
  CLI::App* baselines = app.add_subcommand("baselines", "round-robin, fixed-learner and random-search controls");
  add_run_flags(baselines, base_flags, false);

  CompareFlags cmp;
  CLI::App* compare = app.add_subcommand("compare", "Wilcoxon signed-rank test between two report columns");
  compare->add_option("--report", cmp.report, "TSV report")->required()->check(CLI::ExistingFile);
  compare->add_option("--against", cmp.against, "second TSV report holding column B")
      ->check(CLI::ExistingFile);
  compare->add_option("-a,--column-a", cmp.column_a);
  compare->add_option("-b,--column-b", cmp.column_b);

  std::string report_in;
  std::string report_format = "markdown";
  std::string report_out;
  CLI::App* report = app.add_subcommand("report", "re-emit a TSV report");
  report->add_option("--in", report_in, "TSV report")->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_format)->check(CLI::IsMember({"tsv", "markdown"}));
  report->add_option("--out", report_out, "output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return do_run(build_config(run_flags, nullptr));
    if (*baselines) {
      const auto methods = baseline_methods();
      return do_run(build_config(base_flags, &methods));
    }
    if (*compare) return do_compare(cmp);
    if (*report) {
      const MinMatrix m = load_tsv(report_in);
      const std::string text = report_format == "tsv" ? emit_tsv(m) : emit_markdown(m);
      if (report_out.empty()) {
        std::cout << text;
      } else {
        write_file(report_out, text);
      }
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
