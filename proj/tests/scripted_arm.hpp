// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "massah/massah.hpp"

namespace massah::test {

// Replays a fixed risk sequence, one value per evaluation, cycling at the
// end. E(Q) is the running mean of the values seen.
class ScriptedArm : public Arm {
 public:
  ScriptedArm(std::size_t id, std::vector<double> script) : id_(id), script_(std::move(script)) {}

  std::string name() const override { return "scripted" + std::to_string(id_); }

  ArmStep step(const StepBudget& budget) override {
    const auto n = static_cast<std::size_t>(std::max(1.0, budget.amount));
    ArmStep s;
    for (std::size_t k = 0; k < n; ++k) {
      const double r = script_[seen_.size() % script_.size()];
      seen_.push_back(r);
      if (seen_.size() == 1 || r < seen_[best_]) best_ = seen_.size() - 1;
      s.max_risk = std::max(s.max_risk, r);
    }
    s.incumbent_risk = seen_[best_];
    s.evaluations = n;
    return s;
  }

  double expected_risk() const override {
    double sum = 0.0;
    for (double r : seen_) sum += r;
    return seen_.empty() ? 1.0 : sum / static_cast<double>(seen_.size());
  }

  Configuration config() const override {
    if (seen_.empty()) throw std::logic_error("no evaluations");
    return Configuration{id_, {static_cast<double>(best_)}};
  }

  std::size_t evaluations() const { return seen_.size(); }

 private:
  std::size_t id_;
  std::vector<double> script_;
  std::vector<double> seen_;
  std::size_t best_ = 0;
};

// Risk surface that decays from `start` toward `floor` with rate `rate` per
// evaluation, plus seeded Gaussian noise, clamped to [0, 1].
class SyntheticArm : public ScriptedArm {
 public:
  SyntheticArm(std::size_t id, double start, double floor, double rate, double noise,
               std::uint64_t seed, std::size_t length = 4096)
      : ScriptedArm(id, curve(start, floor, rate, noise, seed, length)) {}

 private:
  static std::vector<double> curve(double start, double floor, double rate, double noise,
                                   std::uint64_t seed, std::size_t length) {
    Rng rng(seed);
    std::vector<double> v(length);
    for (std::size_t k = 0; k < length; ++k) {
      const double mean = floor + (start - floor) * std::exp(-rate * static_cast<double>(k));
      v[k] = std::clamp(mean + rng.normal(0.0, noise), 0.0, 1.0);
    }
    return v;
  }
};

// One arm converging to 0.05, the rest plateauing at 0.4.
inline std::vector<std::unique_ptr<Arm>> dominated_portfolio(std::size_t n_arms, std::size_t best,
                                                             std::uint64_t seed) {
  std::vector<std::unique_ptr<Arm>> arms;
  for (std::size_t i = 0; i < n_arms; ++i) {
    const std::uint64_t s = Rng::derive(seed, i);
    if (i == best) {
      arms.push_back(std::make_unique<SyntheticArm>(i, 0.6, 0.05, 0.08, 0.03, s));
    } else {
      arms.push_back(std::make_unique<SyntheticArm>(i, 0.6, 0.4, 0.2, 0.03, s));
    }
  }
  return arms;
}

inline std::vector<std::unique_ptr<Arm>> scripted_arms(
    const std::vector<std::vector<double>>& scripts) {
  std::vector<std::unique_ptr<Arm>> arms;
  for (std::size_t i = 0; i < scripts.size(); ++i) {
    arms.push_back(std::make_unique<ScriptedArm>(i, scripts[i]));
  }
  return arms;
}

}  // namespace massah::test
