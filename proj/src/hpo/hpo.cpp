// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/hpo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace massah {

namespace {

constexpr double kNeighborSd = 0.2;  // in unit-cube coordinates
constexpr double kFailedRisk = 1.0;

bool contains_config(const std::vector<Configuration>& v, const Configuration& c) {
  return std::find(v.begin(), v.end(), c) != v.end();
}

bool in_history(const ProcessState& s, const Configuration& c) {
  return std::any_of(s.history.begin(), s.history.end(),
                     [&](const Observation& o) { return o.config == c; });
}

Configuration fresh_random(ProcessState& state) {
  // Bounded retries; small discrete spaces may be exhausted.
  Configuration c = state.space.sample(state.algorithm_id, state.rng);
  for (int attempt = 0; attempt < 32 && in_history(state, c); ++attempt) {
    c = state.space.sample(state.algorithm_id, state.rng);
  }
  return c;
}

}  // namespace

ProcessState::ProcessState(std::size_t algorithm_id_, HyperparameterSpace space_,
                           std::uint64_t seed)
    : algorithm_id(algorithm_id_), space(std::move(space_)), rng(seed) {}

const Observation& ProcessState::best() const {
  if (!incumbent) throw std::logic_error("process has no evaluations yet");
  return history[*incumbent];
}

void ProcessState::record(Observation o) {
  history.push_back(std::move(o));
  if (!incumbent || history.back().risk < history[*incumbent].risk) {
    incumbent = history.size() - 1;
  }
}

double ProcessState::mean_risk() const {
  if (history.empty()) return kFailedRisk;
  double sum = 0.0;
  for (const auto& o : history) sum += o.risk;
  return sum / static_cast<double>(history.size());
}

std::vector<Configuration> neighbors(const HyperparameterSpace& space, const Configuration& c,
                                     std::size_t numeric_steps, Rng& rng) {
  space.validate(c);
  std::vector<Configuration> out;
  for (std::size_t i = 0; i < space.size(); ++i) {
    const ParamSpec& p = space[i];
    if (p.is_categorical()) {
      for (std::size_t v = 0; v < p.choices.size(); ++v) {
        if (static_cast<double>(v) == c.values[i]) continue;
        Configuration n = c;
        n.values[i] = static_cast<double>(v);
        out.push_back(std::move(n));
      }
      continue;
    }
    const double unit = p.to_unit(c.values[i]);
    for (std::size_t s = 0; s < numeric_steps; ++s) {
      Configuration n = c;
      n.values[i] = p.from_unit(unit + rng.normal(0.0, kNeighborSd));
      if (n.values[i] == c.values[i] || contains_config(out, n)) continue;
      out.push_back(std::move(n));
    }
  }
  return out;
}

void refresh_surrogate(ProcessState& state, const OptimizerOptions& options) {
  if (state.history.empty() || state.surrogate_fit_size == state.history.size()) return;
  state.surrogate = SurrogateModel::fit(state.space, state.history,
                                        Rng::derive(state.rng(), state.history.size()),
                                        options.surrogate);
  state.surrogate_fit_size = state.history.size();
}

std::vector<Configuration> propose_candidates(ProcessState& state,
                                              const OptimizerOptions& options) {
  std::vector<Configuration> out;
  const bool model_based = options.strategy == SearchStrategy::kSmbo &&
                           state.history.size() >= std::max<std::size_t>(options.min_history, 1);
  if (!model_based) {
    for (std::size_t i = 0; i < options.n_random; ++i) {
      Configuration c = fresh_random(state);
      if (!contains_config(out, c)) out.push_back(std::move(c));
    }
    return out;
  }

  refresh_surrogate(state, options);
  std::vector<Configuration> pool =
      neighbors(state.space, state.best().config, options.numeric_steps, state.rng);
  if (options.n_local && pool.size() > *options.n_local) {
    state.rng.shuffle(pool.begin(), pool.end());
    pool.resize(*options.n_local);
  }
  for (std::size_t i = 0; i < options.n_random; ++i) {
    pool.push_back(state.space.sample(state.algorithm_id, state.rng));
  }
  for (auto& c : pool) {
    if (!in_history(state, c) && !contains_config(out, c)) out.push_back(std::move(c));
  }

  const double best = state.best().risk;
  std::vector<double> ei(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    ei[i] = expected_improvement(state.surrogate->predict(out[i]), best);
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ei[a] > ei[b]; });
  std::vector<Configuration> ranked;
  ranked.reserve(out.size());
  for (std::size_t i : order) ranked.push_back(std::move(out[i]));
  return ranked;
}

StepResult step(ProcessState& state, const StepBudget& budget, const Evaluator& evaluate,
                const OptimizerOptions& options) {
  if (!(budget.amount >= 0.0)) throw std::invalid_argument("step budget must be >= 0");
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };
  const auto max_evals = static_cast<std::size_t>(
      std::max(1.0, std::floor(budget.amount + 1e-9)));

  StepResult result;
  while (true) {
    // Each evaluation uses the freshest model of the history.
    std::vector<Configuration> candidates = propose_candidates(state, options);
    Configuration next = candidates.empty() ? fresh_random(state) : std::move(candidates.front());

    Observation o{next, kFailedRisk, false};
    try {
      const double r = evaluate(next);
      if (std::isnan(r)) {
        o.failed = true;
      } else {
        o.risk = r;
      }
    } catch (const std::exception&) {
      o.failed = true;
    }
    result.step_best_risk =
        result.evaluations == 0 ? o.risk : std::min(result.step_best_risk, o.risk);
    state.record(std::move(o));
    ++result.evaluations;

    const bool done = budget.mode == BudgetMode::kEvaluations
                          ? result.evaluations >= max_evals
                          : elapsed() >= budget.amount;
    if (done) break;
  }
  if (options.strategy == SearchStrategy::kSmbo && state.history.size() >= options.min_history) {
    refresh_surrogate(state, options);
  }
  result.incumbent = state.best().config;
  result.incumbent_risk = state.best().risk;
  result.elapsed_seconds = elapsed();
  return result;
}

double expected_incumbent_risk(const ProcessState& state) {
  if (state.surrogate && state.has_incumbent()) {
    return state.surrogate->predict(state.best().config).mean;
  }
  return state.mean_risk();
}

std::string history_record(std::size_t iteration, const std::string& algorithm_name,
                           const HyperparameterSpace& space, const Observation& o) {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < space.size(); ++i) {
    const ParamSpec& p = space[i];
    const double v = o.config.values.at(i);
    if (p.is_categorical()) {
      config[p.name] = p.choices.at(static_cast<std::size_t>(v));
    } else if (p.kind == ParamKind::kInteger) {
      config[p.name] = static_cast<long long>(v);
    } else {
      config[p.name] = v;
    }
  }
  nlohmann::ordered_json j;
  j["iteration"] = iteration;
  j["algorithm_id"] = o.config.algorithm_id;
  j["algorithm"] = algorithm_name;
  j["config"] = std::move(config);
  j["risk"] = o.risk;
  j["failed"] = o.failed;
  return j.dump();
}

}  // namespace massah
