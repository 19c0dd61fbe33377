// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/bandit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace massah {

namespace {

std::size_t argmax_lowest(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

void require_arms(const ArmStats& stats) {
  if (stats.n_arms() == 0) throw std::invalid_argument("bandit has no arms");
}

std::string short_number(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

}  // namespace

void PolicyParams::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
}

std::string PolicyParams::name() const {
  std::string base;
  switch (policy) {
    case PolicyKind::kEpsilonGreedy:
      base = short_number(epsilon) + "-greedy";
      break;
    case PolicyKind::kUcb1:
      base = "UCB1";
      break;
    case PolicyKind::kSoftmax:
      base = "Softmax";
      break;
    case PolicyKind::kRoundRobin:
      base = "RoundRobin";
      break;
  }
  return reward == RewardKind::kExpectation ? base + "_E(Q)" : base;
}

PolicyParams parse_policy(const std::string& name) {
  PolicyParams p;
  std::string base = name;
  const std::string suffix = "_E(Q)";
  if (base.size() > suffix.size() && base.ends_with(suffix)) {
    p.reward = RewardKind::kExpectation;
    base.resize(base.size() - suffix.size());
  }
  std::string lower = base;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "ucb1") {
    p.policy = PolicyKind::kUcb1;
  } else if (lower == "softmax") {
    p.policy = PolicyKind::kSoftmax;
  } else if (lower == "roundrobin" || lower == "round-robin") {
    p.policy = PolicyKind::kRoundRobin;
  } else if (lower.ends_with("-greedy")) {
    p.policy = PolicyKind::kEpsilonGreedy;
    const std::string eps = lower.substr(0, lower.size() - 7);
    const auto r = std::from_chars(eps.data(), eps.data() + eps.size(), p.epsilon);
    if (eps.empty() || r.ec != std::errc() || r.ptr != eps.data() + eps.size()) {
      throw std::invalid_argument("bad epsilon in policy '" + name + "'");
    }
  } else {
    throw std::invalid_argument("unknown policy '" + name + "'");
  }
  p.validate();
  return p;
}

ArmStats::ArmStats(std::size_t n_arms) : counts_(n_arms, 0), sums_(n_arms, 0.0), means_(n_arms, 0.0) {}

bool ArmStats::all_pulled() const {
  return std::all_of(counts_.begin(), counts_.end(), [](std::size_t n) { return n > 0; });
}

void ArmStats::update(std::size_t arm, double reward) {
  if (!std::isfinite(reward)) throw std::invalid_argument("reward must be finite");
  ++counts_.at(arm);
  sums_[arm] += reward;
  means_[arm] = sums_[arm] / static_cast<double>(counts_[arm]);
  ++t_;
}

void ArmStats::set_mean(std::size_t arm, double mean) {
  if (!(mean >= 0.0 && mean <= 1.0)) throw std::invalid_argument("expectation reward outside [0, 1]");
  ++counts_.at(arm);
  means_[arm] = mean;
  sums_[arm] = mean * static_cast<double>(counts_[arm]);
  ++t_;
}

std::size_t select_epsilon_greedy(const ArmStats& stats, double epsilon, Rng& rng) {
  require_arms(stats);
  if (epsilon > 0.0 && rng.uniform() < epsilon) return rng.below(stats.n_arms());
  return argmax_lowest(stats.means());
}

std::size_t select_ucb1(const ArmStats& stats) {
  require_arms(stats);
  if (!stats.all_pulled()) throw std::logic_error("UCB1 requires every arm to be pulled once");
  const double log_t = std::log(static_cast<double>(stats.t()));
  std::vector<double> score(stats.n_arms());
  for (std::size_t i = 0; i < score.size(); ++i) {
    score[i] = stats.mean(i) + std::sqrt(2.0 * log_t / static_cast<double>(stats.count(i)));
  }
  return argmax_lowest(score);
}

std::vector<double> softmax_probabilities(const ArmStats& stats, double tau) {
  require_arms(stats);
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  const double top = *std::max_element(stats.means().begin(), stats.means().end());
  std::vector<double> p(stats.n_arms());
  double z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp((stats.mean(i) - top) / tau);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

std::size_t select_softmax(const ArmStats& stats, double tau, Rng& rng) {
  const std::vector<double> p = softmax_probabilities(stats, tau);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding left u above the final partial sum.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return p.size() - 1;
}

std::size_t select_arm(const ArmStats& stats, const PolicyParams& params, Rng& rng) {
  switch (params.policy) {
    case PolicyKind::kEpsilonGreedy:
      return select_epsilon_greedy(stats, params.epsilon, rng);
    case PolicyKind::kUcb1:
      return select_ucb1(stats);
    case PolicyKind::kSoftmax:
      return select_softmax(stats, params.tau, rng);
    case PolicyKind::kRoundRobin:
      require_arms(stats);
      return stats.t() % stats.n_arms();
  }
  throw std::logic_error("unknown policy");
}

double reward_naive(double best_before, double risk_now) {
  return std::max(best_before - risk_now, 0.0);
}

void RewardContext::observe(double risk) { q_max = std::max(q_max, risk); }

double reward_expectation(double q_max, double expectation) {
  if (q_max <= 0.0) return 1.0;
  return std::clamp((q_max - expectation) / q_max, 0.0, 1.0);
}

}  // namespace massah
