// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "massah/bandit.hpp"
#include "massah/dataset.hpp"
#include "massah/hpo.hpp"
#include "massah/learners.hpp"

namespace massah {

// Global budget T split into quanta t. In evaluation mode both count
// empirical-risk evaluations; in wall-clock mode both are seconds.
struct Budget {
  BudgetMode mode = BudgetMode::kEvaluations;
  double quantum = 5;
  double total = 150;

  static Budget evaluations(std::size_t quantum, std::size_t total) {
    return {BudgetMode::kEvaluations, static_cast<double>(quantum), static_cast<double>(total)};
  }
  static Budget seconds(double quantum, double total) {
    return {BudgetMode::kWallClock, quantum, total};
  }

  // q = floor(T / t) - N. Throws std::invalid_argument when q < 0, t <= 0,
  // or an evaluation quantum is not a whole number.
  std::size_t iterations(std::size_t n_arms) const;
  StepBudget step() const;
};

// Result of one arm play.
struct ArmStep {
  double incumbent_risk = 1.0;  // e_i after the step
  double max_risk = 0.0;        // largest risk evaluated during the step
  std::size_t evaluations = 0;
};

// One sequential optimization process seen from the bandit.
class Arm {
 public:
  virtual ~Arm() = default;
  virtual std::string name() const = 0;
  virtual ArmStep step(const StepBudget& budget) = 0;
  // E(Q) at the incumbent, used by the expectation reward.
  virtual double expected_risk() const = 0;
  // Incumbent configuration; throws before the first step.
  virtual Configuration config() const = 0;
  // Space of config(); empty for arms without named parameters.
  virtual HyperparameterSpace space() const { return {}; }
};

// Hyperparameter optimization of one learner on a dataset.
class OptimizerArm : public Arm {
 public:
  OptimizerArm(const AlgorithmDescriptor& algorithm, const Dataset& data, std::uint64_t seed,
               OptimizerOptions options = {});

  std::string name() const override { return name_; }
  ArmStep step(const StepBudget& budget) override;
  double expected_risk() const override { return optimizer_.expected_risk(); }
  Configuration config() const override;
  HyperparameterSpace space() const override { return optimizer_.state().space; }
  const ProcessState& state() const { return optimizer_.state(); }

 private:
  std::string name_;
  const Dataset* data_;
  std::uint64_t eval_seed_;
  SequentialOptimizer optimizer_;
};

struct TraceEntry {
  std::size_t iteration = 0;  // init plays are 0 .. N-1
  std::size_t arm = 0;
  double risk = 1.0;          // e_i
  double reward = 0.0;
  double best_risk = 1.0;     // running best after this play
  bool init = false;
  std::size_t evaluations = 0;  // cumulative
  Configuration config;         // the arm's incumbent after this play

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

struct SearchResult {
  Configuration best_config;
  double best_risk = 1.0;
  std::size_t best_arm = 0;
  std::vector<TraceEntry> trace;
  std::size_t total_evaluations = 0;
  double elapsed_seconds = 0.0;
  std::vector<std::string> arm_names;
  std::vector<HyperparameterSpace> arm_spaces;
};

// The incumbent of a process; throws std::logic_error on an empty history.
Configuration get_config(const ProcessState& state);

// Folds risk_now into ctx.q_max, then returns the naive reward
// (best_before, risk_now) or the expectation reward of `expectation`.
double reward_for_iteration(const PolicyParams& policy, RewardContext& ctx, double expectation,
                            double best_before, double risk_now);

// Init phase (each arm plays once), then q bandit-driven plays. The policy
// rng is seeded from policy.seed.
SearchResult run_massah(std::vector<std::unique_ptr<Arm>>& arms, const PolicyParams& policy,
                        const Budget& budget);

// One OptimizerArm per listed algorithm id, seeded from `seed`.
std::vector<std::unique_ptr<Arm>> make_arms(const Dataset& data,
                                            const std::vector<std::size_t>& algorithms,
                                            std::uint64_t seed,
                                            const OptimizerOptions& options = {});

// Runs over the whole portfolio with policy.seed replaced by `seed`.
SearchResult run_massah(const Dataset& data, const PolicyParams& policy, const Budget& budget,
                        std::uint64_t seed, const OptimizerOptions& options = {});

// One JSON object per trace entry, in the history-record layout plus arm,
// reward, best_risk, init and evaluations.
void write_trace(std::ostream& out, const SearchResult& result);

}  // namespace massah
