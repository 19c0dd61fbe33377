// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "massah/hyperparameters.hpp"

namespace massah {

// One evaluated configuration of a sequential optimization process.
struct Observation {
  Configuration config;
  double risk = 1.0;
  bool failed = false;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
  double stddev() const;
};

struct SurrogateOptions {
  std::size_t n_trees = 10;
  std::size_t min_samples_split = 3;
  int max_depth = 20;
};

// Bagged regression trees over the unit-cube encoding of configurations.
// The predictive variance is the spread of the per-tree predictions.
class SurrogateModel {
 public:
  static SurrogateModel fit(const HyperparameterSpace& space,
                            std::span<const Observation> history, std::uint64_t seed,
                            const SurrogateOptions& options = {});

  Prediction predict(const Configuration& c) const;
  std::size_t n_trees() const { return trees_.size(); }

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    double value = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };
  using Tree = std::vector<Node>;

  static double tree_predict(const Tree& t, std::span<const double> x);

  HyperparameterSpace space_;
  std::vector<Tree> trees_;
};

// Gaussian expected improvement for minimization:
// sigma * (u * Phi(u) + phi(u)) with u = (best - mean) / sigma, and
// max(best - mean, 0) when sigma = 0.
double expected_improvement(double mean, double sigma, double best);
inline double expected_improvement(const Prediction& p, double best) {
  return expected_improvement(p.mean, p.stddev(), best);
}

}  // namespace massah
