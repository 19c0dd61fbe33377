// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/massah.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

namespace massah {

std::size_t Budget::iterations(std::size_t n_arms) const {
  if (!(quantum > 0.0) || !std::isfinite(quantum)) {
    throw std::invalid_argument("budget quantum must be positive");
  }
  if (!(total >= 0.0) || !std::isfinite(total)) throw std::invalid_argument("bad total budget");
  if (mode == BudgetMode::kEvaluations && quantum != std::floor(quantum)) {
    throw std::invalid_argument("evaluation quantum must be a whole number");
  }
  if (n_arms == 0) throw std::invalid_argument("portfolio is empty");
  const double slots = std::floor(total / quantum + 1e-9);
  if (slots < static_cast<double>(n_arms)) {
    throw std::invalid_argument("total budget leaves no room for the init phase: floor(T/t) < N");
  }
  return static_cast<std::size_t>(slots) - n_arms;
}

StepBudget Budget::step() const {
  return mode == BudgetMode::kEvaluations ? StepBudget::evaluations(static_cast<std::size_t>(quantum))
                                          : StepBudget::seconds(quantum);
}

OptimizerArm::OptimizerArm(const AlgorithmDescriptor& algorithm, const Dataset& data,
                           std::uint64_t seed, OptimizerOptions options)
    : name_(algorithm.name),
      data_(&data),
      eval_seed_(Rng::derive(seed, 1)),
      optimizer_(algorithm.id, algorithm.space, Rng::derive(seed, 0), std::move(options)) {}

ArmStep OptimizerArm::step(const StepBudget& budget) {
  const std::size_t before = optimizer_.state().history.size();
  const StepResult r = optimizer_.step(budget, [this](const Configuration& c) {
    return empirical_risk(c, *data_, eval_seed_);
  });
  ArmStep out;
  out.incumbent_risk = r.incumbent_risk;
  out.evaluations = r.evaluations;
  const auto& h = optimizer_.state().history;
  for (std::size_t i = before; i < h.size(); ++i) out.max_risk = std::max(out.max_risk, h[i].risk);
  return out;
}

Configuration OptimizerArm::config() const { return get_config(optimizer_.state()); }

Configuration get_config(const ProcessState& state) {
  if (!state.has_incumbent()) throw std::logic_error("process has no evaluations yet");
  return state.best().config;
}

double reward_for_iteration(const PolicyParams& policy, RewardContext& ctx, double expectation,
                            double best_before, double risk_now) {
  ctx.observe(risk_now);
  return policy.reward == RewardKind::kNaive ? reward_naive(best_before, risk_now)
                                             : reward_expectation(ctx, expectation);
}

namespace {

void credit(ArmStats& stats, const PolicyParams& policy, std::size_t arm, double reward) {
  if (policy.reward == RewardKind::kExpectation) {
    stats.set_mean(arm, reward);
  } else {
    stats.update(arm, reward);
  }
}

}  // namespace

SearchResult run_massah(std::vector<std::unique_ptr<Arm>>& arms, const PolicyParams& policy,
                        const Budget& budget) {
  policy.validate();
  const std::size_t n = arms.size();
  const std::size_t q = budget.iterations(n);
  const StepBudget quantum = budget.step();

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  SearchResult result;
  for (const auto& a : arms) {
    result.arm_names.push_back(a->name());
    result.arm_spaces.push_back(a->space());
  }

  ArmStats stats(n);
  RewardContext ctx;
  Rng rng(Rng::derive(policy.seed, 0x7011c7));
  double best_err = INFINITY;
  std::size_t best_proc = 0;

  // Init phase: every arm plays once. Rewards are assigned afterwards so
  // that the expectation reward sees Q_max over all init risks.
  std::vector<double> init_risk(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ArmStep s = arms[i]->step(quantum);
    result.total_evaluations += s.evaluations;
    ctx.observe(std::max(s.max_risk, s.incumbent_risk));
    init_risk[i] = s.incumbent_risk;
    if (s.incumbent_risk < best_err) {
      best_err = s.incumbent_risk;
      best_proc = i;
    }
    TraceEntry e;
    e.iteration = i;
    e.arm = i;
    e.risk = s.incumbent_risk;
    e.best_risk = best_err;
    e.init = true;
    e.evaluations = result.total_evaluations;
    e.config = arms[i]->config();
    result.trace.push_back(std::move(e));
  }
  for (std::size_t i = 0; i < n; ++i) {
    // Improvement over the worst possible risk of 1.
    const double reward = reward_for_iteration(policy, ctx, arms[i]->expected_risk(), 1.0,
                                               init_risk[i]);
    credit(stats, policy, i, reward);
    result.trace[i].reward = reward;
  }

  for (std::size_t k = 0; k < q; ++k) {
    if (budget.mode == BudgetMode::kWallClock && elapsed() >= budget.total) break;
    const std::size_t i = select_arm(stats, policy, rng);
    const ArmStep s = arms[i]->step(quantum);
    result.total_evaluations += s.evaluations;
    ctx.observe(s.max_risk);
    const double reward =
        reward_for_iteration(policy, ctx, arms[i]->expected_risk(), best_err, s.incumbent_risk);
    credit(stats, policy, i, reward);
    if (s.incumbent_risk < best_err) {
      best_err = s.incumbent_risk;
      best_proc = i;
    }
    TraceEntry e;
    e.iteration = n + k;
    e.arm = i;
    e.risk = s.incumbent_risk;
    e.reward = reward;
    e.best_risk = best_err;
    e.evaluations = result.total_evaluations;
    e.config = arms[i]->config();
    result.trace.push_back(std::move(e));
  }

  result.best_arm = best_proc;
  result.best_risk = best_err;
  result.best_config = arms[best_proc]->config();
  result.elapsed_seconds = elapsed();
  return result;
}

std::vector<std::unique_ptr<Arm>> make_arms(const Dataset& data,
                                            const std::vector<std::size_t>& algorithms,
                                            std::uint64_t seed, const OptimizerOptions& options) {
  std::vector<std::unique_ptr<Arm>> arms;
  for (std::size_t id : algorithms) {
    arms.push_back(std::make_unique<OptimizerArm>(algorithm(id), data, Rng::derive(seed, 100 + id),
                                                  options));
  }
  return arms;
}

SearchResult run_massah(const Dataset& data, const PolicyParams& policy, const Budget& budget,
                        std::uint64_t seed, const OptimizerOptions& options) {
  std::vector<std::size_t> ids;
  for (const auto& a : portfolio()) ids.push_back(a.id);
  auto arms = make_arms(data, ids, seed, options);
  PolicyParams p = policy;
  p.seed = seed;
  return run_massah(arms, p, budget);
}

void write_trace(std::ostream& out, const SearchResult& result) {
  for (const TraceEntry& e : result.trace) {
    const HyperparameterSpace& space = result.arm_spaces.at(e.arm);
    const Observation o{e.config, e.risk, false};
    nlohmann::ordered_json j;
    if (space.size() == e.config.values.size() && !space.empty()) {
      j = nlohmann::ordered_json::parse(
          history_record(e.iteration, result.arm_names.at(e.arm), space, o));
    } else {
      j["iteration"] = e.iteration;
      j["algorithm_id"] = e.config.algorithm_id;
      j["algorithm"] = result.arm_names.at(e.arm);
      j["config"] = e.config.values;
      j["risk"] = e.risk;
      j["failed"] = false;
    }
    j["arm"] = e.arm;
    j["reward"] = e.reward;
    j["best_risk"] = e.best_risk;
    j["init"] = e.init;
    j["evaluations"] = e.evaluations;
    out << j.dump() << '\n';
  }
}

}  // namespace massah
