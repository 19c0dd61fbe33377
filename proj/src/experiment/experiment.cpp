// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace massah {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad or missing '" + std::string(key) + "' in " + where);
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

DatasetSpec parse_dataset(const json& j, std::size_t index) {
  const std::string where = "datasets[" + std::to_string(index) + "]";
  DatasetSpec d;
  if (j.is_string()) {
    d.path = j.get<std::string>();
    return d;
  }
  if (!j.is_object()) throw ConfigError(where + " must be a path or an object");
  reject_unknown(j, {"name", "path", "test", "test_fraction", "stratified", "split_seed", "label"},
                 where);
  d.path = get<std::string>(j, "path", where);
  maybe(j, "name", d.name, where);
  maybe(j, "test", d.test_path, where);
  maybe(j, "test_fraction", d.test_fraction, where);
  maybe(j, "stratified", d.stratified, where);
  maybe(j, "split_seed", d.split_seed, where);
  maybe(j, "label", d.label, where);
  return d;
}

std::string describe(const Configuration& c) {
  return algorithm(c.algorithm_id).space.describe(c);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("no datasets configured");
  if (methods.empty()) throw ConfigError("no methods configured");
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  for (const auto& d : datasets) {
    if (d.path.empty()) throw ConfigError("dataset path is empty");
    if (d.test_path.empty() && !(d.test_fraction > 0.0 && d.test_fraction < 1.0)) {
      throw ConfigError("test_fraction must lie in (0, 1)");
    }
  }
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!seen.insert(m).second) throw ConfigError("duplicate method '" + m + "'");
    try {
      parse_method(m, tau);
    } catch (const std::logic_error& e) {
      throw ConfigError(e.what());
    }
  }
  try {
    budget.iterations(portfolio().size());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("budget: ") + e.what());
  }
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j, {"datasets", "methods", "tau", "budget", "repeats", "seed", "jobs",
                     "strategy", "output"},
                 "config");
  ExperimentConfig cfg;
  if (j.contains("datasets")) {
    if (!j["datasets"].is_array()) throw ConfigError("'datasets' must be an array");
    for (std::size_t i = 0; i < j["datasets"].size(); ++i) {
      cfg.datasets.push_back(parse_dataset(j["datasets"][i], i));
    }
  }
  maybe(j, "methods", cfg.methods, "config");
  maybe(j, "tau", cfg.tau, "config");
  maybe(j, "repeats", cfg.repeats, "config");
  maybe(j, "seed", cfg.seed, "config");
  maybe(j, "jobs", cfg.jobs, "config");
  if (j.contains("strategy")) {
    const auto s = get<std::string>(j, "strategy", "config");
    if (s == "smbo") {
      cfg.strategy = SearchStrategy::kSmbo;
    } else if (s == "random") {
      cfg.strategy = SearchStrategy::kRandom;
    } else {
      throw ConfigError("strategy must be 'smbo' or 'random'");
    }
  }
  if (j.contains("budget")) {
    const json& b = j["budget"];
    if (!b.is_object()) throw ConfigError("'budget' must be an object");
    reject_unknown(b, {"mode", "quantum", "total"}, "budget");
    if (b.contains("mode")) {
      const auto mode = get<std::string>(b, "mode", "budget");
      if (mode == "evaluations") {
        cfg.budget.mode = BudgetMode::kEvaluations;
      } else if (mode == "wallclock") {
        cfg.budget.mode = BudgetMode::kWallClock;
      } else {
        throw ConfigError("budget mode must be 'evaluations' or 'wallclock'");
      }
    }
    maybe(b, "quantum", cfg.budget.quantum, "budget");
    maybe(b, "total", cfg.budget.total, "budget");
  }
  if (j.contains("output")) {
    const json& o = j["output"];
    if (!o.is_object()) throw ConfigError("'output' must be an object");
    reject_unknown(o, {"tsv", "markdown", "runs", "trace_dir"}, "output");
    maybe(o, "tsv", cfg.out, "output");
    maybe(o, "markdown", cfg.markdown_out, "output");
    maybe(o, "runs", cfg.runs_out, "output");
    maybe(o, "trace_dir", cfg.trace_dir, "output");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  // Relative dataset paths are taken from the config file's directory.
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& d : cfg.datasets) {
    for (std::string* p : {&d.path, &d.test_path}) {
      if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).string();
    }
  }
  return cfg;
}

Method parse_method(const std::string& name, double tau) {
  Method m;
  m.name = name;
  if (name == "RandomSearch") {
    m.kind = Method::Kind::kRandomSearch;
    return m;
  }
  if (name.starts_with("Fixed:")) {
    m.kind = Method::Kind::kFixed;
    m.algorithm = algorithm_id(name.substr(6));
    return m;
  }
  m.kind = Method::Kind::kPolicy;
  m.policy = parse_policy(name);
  m.policy.tau = tau;
  m.policy.validate();
  return m;
}

std::size_t random_search_algorithm(std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x5eed));
  return static_cast<std::size_t>(rng.below(portfolio().size()));
}

SearchResult run_method(const Dataset& data, const Method& method, const Budget& budget,
                        std::uint64_t seed, SearchStrategy strategy) {
  OptimizerOptions options;
  options.strategy = strategy;
  if (method.kind == Method::Kind::kPolicy) {
    return run_massah(data, method.policy, budget, seed, options);
  }
  std::size_t id = method.algorithm;
  if (method.kind == Method::Kind::kRandomSearch) {
    id = random_search_algorithm(seed);
    options.strategy = SearchStrategy::kRandom;
  }
  auto arms = make_arms(data, {id}, seed, options);
  PolicyParams single;
  single.seed = seed;
  return run_massah(arms, single, budget);
}

Dataset load_experiment_dataset(const DatasetSpec& spec) {
  CsvOptions csv;
  csv.label_column = spec.label;
  Dataset d = spec.test_path.empty()
                  ? split_train_test(load_dataset(spec.path, std::nullopt, csv), spec.test_fraction,
                                     spec.split_seed, spec.stratified, true)
                  : load_dataset(spec.path, spec.test_path, csv);
  return d;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, const RunObserver& observer) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  std::vector<Dataset> data;
  std::vector<std::string> names;
  for (const auto& spec : cfg.datasets) {
    data.push_back(load_experiment_dataset(spec));
    names.push_back(spec.name.empty() ? data.back().name() : spec.name);
  }
  if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
    throw ConfigError("dataset names must be unique");
  }
  std::vector<Method> methods;
  for (const auto& m : cfg.methods) methods.push_back(parse_method(m, cfg.tau));

  ExperimentReport report;
  report.datasets = names;
  report.methods = cfg.methods;
  report.budget = cfg.budget;
  report.base_seed = cfg.seed;
  report.repeats = cfg.repeats;

  const std::size_t per_dataset = methods.size() * cfg.repeats;
  const std::size_t total = data.size() * per_dataset;
  report.runs.resize(total);
  std::atomic<std::size_t> next{0};
  std::mutex observer_mutex;

  const auto worker = [&] {
    for (std::size_t task = next++; task < total; task = next++) {
      const std::size_t di = task / per_dataset;
      const std::size_t mi = task % per_dataset / cfg.repeats;
      const std::size_t run = task % cfg.repeats;
      RunRecord& rec = report.runs[task];
      rec.dataset = names[di];
      rec.method = cfg.methods[mi];
      rec.run = run;
      rec.seed = cfg.seed + run;
      std::optional<SearchResult> result;
      try {
        result = run_method(data[di], methods[mi], cfg.budget, rec.seed, cfg.strategy);
        rec.risk = result->best_risk;
        rec.algorithm = algorithm(result->best_config.algorithm_id).name;
        rec.config = describe(result->best_config);
        rec.evaluations = result->total_evaluations;
        rec.elapsed_seconds = result->elapsed_seconds;
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.risk = NAN;
        rec.error = e.what();
      }
      if (observer) {
        const std::lock_guard lock(observer_mutex);
        observer(rec, result ? &*result : nullptr);
      }
    }
  };
  const std::size_t threads = std::min(cfg.jobs, std::max<std::size_t>(total, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<std::string> baseline_methods() {
  std::vector<std::string> out{"RoundRobin"};
  for (const auto& a : portfolio()) out.push_back("Fixed:" + a.name);
  out.push_back("RandomSearch");
  return out;
}

}  // namespace massah
