// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "massah/hyperparameters.hpp"
#include "massah/random.hpp"
#include "massah/surrogate.hpp"

namespace massah {

enum class BudgetMode { kEvaluations, kWallClock };

// Budget handed to one step of a process: a number of evaluations, or
// seconds of wall-clock time.
struct StepBudget {
  BudgetMode mode = BudgetMode::kEvaluations;
  double amount = 1.0;

  static StepBudget evaluations(std::size_t n) {
    return {BudgetMode::kEvaluations, static_cast<double>(n)};
  }
  static StepBudget seconds(double s) { return {BudgetMode::kWallClock, s}; }
};

enum class SearchStrategy { kRandom, kSmbo };

struct OptimizerOptions {
  SearchStrategy strategy = SearchStrategy::kSmbo;
  std::size_t numeric_steps = 4;
  std::optional<std::size_t> n_local;  // nullopt: every neighbor
  std::size_t n_random = 10;
  std::size_t min_history = 3;  // observations before model-based proposals
  SurrogateOptions surrogate;
};

// State of one sequential hyperparameter optimization process.
struct ProcessState {
  std::size_t algorithm_id = 0;
  HyperparameterSpace space;
  std::vector<Observation> history;
  std::optional<std::size_t> incumbent;  // index into history
  std::optional<SurrogateModel> surrogate;
  std::size_t surrogate_fit_size = 0;  // history size the surrogate was fit on
  Rng rng;

  ProcessState(std::size_t algorithm_id, HyperparameterSpace space, std::uint64_t seed);

  bool has_incumbent() const { return incumbent.has_value(); }
  const Observation& best() const;
  // Appends and updates the incumbent; ties keep the earlier entry.
  void record(Observation o);
  double mean_risk() const;
};

// Evaluates a configuration and returns its risk. Exceptions and NaN
// results are recorded as failed evaluations at risk 1.0.
using Evaluator = std::function<double(const Configuration&)>;

struct StepResult {
  Configuration incumbent;
  double incumbent_risk = 1.0;
  std::size_t evaluations = 0;
  double elapsed_seconds = 0.0;
  // Lowest risk among this step's own evaluations.
  double step_best_risk = 1.0;
};

// Configurations that differ from `c` in exactly one position: every
// alternative value of each categorical, `numeric_steps` Gaussian
// perturbations (sd 0.2 x range, log space for log-scaled) of each numeric,
// clipped to range. Duplicates and no-op moves are dropped.
std::vector<Configuration> neighbors(const HyperparameterSpace& space, const Configuration& c,
                                     std::size_t numeric_steps, Rng& rng);

// Refits the surrogate if the history grew since the last fit.
void refresh_surrogate(ProcessState& state, const OptimizerOptions& options);

// Local neighbors of the incumbent plus `n_random` uniform configurations,
// minus anything already in the history, sorted by descending expected
// improvement. With fewer than `min_history` observations (or no surrogate)
// returns `n_random` uniform candidates unranked.
std::vector<Configuration> propose_candidates(ProcessState& state,
                                              const OptimizerOptions& options);

// Runs the process for one budget quantum. At least one evaluation happens
// even when a wall-clock budget is already spent.
StepResult step(ProcessState& state, const StepBudget& budget, const Evaluator& evaluate,
                const OptimizerOptions& options = {});

// Surrogate mean at the incumbent, or the running mean of observed risks when
// no surrogate is available.
double expected_incumbent_risk(const ProcessState& state);

// Owns a ProcessState together with its options.
class SequentialOptimizer {
 public:
  SequentialOptimizer(std::size_t algorithm_id, HyperparameterSpace space, std::uint64_t seed,
                      OptimizerOptions options = {})
      : state_(algorithm_id, std::move(space), seed), options_(std::move(options)) {}

  StepResult step(const StepBudget& budget, const Evaluator& evaluate) {
    return massah::step(state_, budget, evaluate, options_);
  }

  const ProcessState& state() const { return state_; }
  const OptimizerOptions& options() const { return options_; }
  double expected_risk() const { return expected_incumbent_risk(state_); }

 private:
  ProcessState state_;
  OptimizerOptions options_;
};

// One history line as a JSON object: iteration, algorithm_id, algorithm,
// config (name to value), risk, failed.
std::string history_record(std::size_t iteration, const std::string& algorithm_name,
                           const HyperparameterSpace& space, const Observation& o);

}  // namespace massah
