// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "massah/random.hpp"

namespace massah {

enum class PolicyKind { kEpsilonGreedy, kUcb1, kSoftmax, kRoundRobin };
enum class RewardKind { kNaive, kExpectation };

struct PolicyParams {
  PolicyKind policy = PolicyKind::kUcb1;
  double epsilon = 0.4;
  double tau = 0.1;
  RewardKind reward = RewardKind::kNaive;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless epsilon in [0, 1] and tau > 0.
  void validate() const;
  // Display name such as "UCB1", "0.4-greedy", "Softmax_E(Q)".
  std::string name() const;
};

// Parses names produced by PolicyParams::name; throws std::invalid_argument.
PolicyParams parse_policy(const std::string& name);

// Per-arm pull counts and mean rewards; t is the total pull count.
class ArmStats {
 public:
  explicit ArmStats(std::size_t n_arms);

  std::size_t n_arms() const { return counts_.size(); }
  std::size_t t() const { return t_; }
  std::size_t count(std::size_t arm) const { return counts_.at(arm); }
  double sum(std::size_t arm) const { return sums_.at(arm); }
  double mean(std::size_t arm) const { return means_.at(arm); }
  const std::vector<double>& means() const { return means_; }
  bool all_pulled() const;

  // Naive mode: n_i += 1, sum += reward.
  void update(std::size_t arm, double reward);
  // Expectation mode: n_i += 1 and the mean is overwritten; mean in [0, 1].
  void set_mean(std::size_t arm, double mean);

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::vector<double> means_;
  std::size_t t_ = 0;
};

// argmax of the means with probability 1 - epsilon, else a uniform arm over
// all arms. Ties go to the lowest index.
std::size_t select_epsilon_greedy(const ArmStats& stats, double epsilon, Rng& rng);

// argmax of mean_i + sqrt(2 ln t / n_i); throws if any arm is unpulled.
std::size_t select_ucb1(const ArmStats& stats);

// p_i proportional to exp(mean_i / tau), computed with max-subtraction.
std::vector<double> softmax_probabilities(const ArmStats& stats, double tau);
std::size_t select_softmax(const ArmStats& stats, double tau, Rng& rng);

// Dispatches on params.policy. Round-robin plays arm (t mod N).
std::size_t select_arm(const ArmStats& stats, const PolicyParams& params, Rng& rng);

// max(best_before - risk_now, 0).
double reward_naive(double best_before, double risk_now);

// Largest risk observed so far, across every process.
struct RewardContext {
  double q_max = 0.0;
  void observe(double risk);
};

// (Q_max - E) / Q_max clamped to [0, 1]; 1 when Q_max is 0.
double reward_expectation(double q_max, double expectation);
inline double reward_expectation(const RewardContext& ctx, double expectation) {
  return reward_expectation(ctx.q_max, expectation);
}

}  // namespace massah
