// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "massah/dataset.hpp"
#include "massah/hyperparameters.hpp"

namespace massah {

// Built-in portfolio order; the enum value is the algorithm id.
enum class Algorithm : std::size_t {
  kKnn = 0,
  kLogisticRegression = 1,
  kDecisionTree = 2,
  kRandomForest = 3,
  kPerceptron = 4,
};

struct AlgorithmDescriptor {
  std::size_t id = 0;
  std::string name;
  HyperparameterSpace space;
};

using Portfolio = std::vector<AlgorithmDescriptor>;

// kNN, logistic regression, decision tree, random forest, perceptron.
const Portfolio& portfolio();
const AlgorithmDescriptor& algorithm(std::size_t id);
std::size_t algorithm_id(const std::string& name);

class SchemaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Learned state behind a TrainedModel. Inputs are raw feature rows in the
// training schema (category indices, kMissing for missing values).
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual int predict(std::span<const double> x) const = 0;
};

struct TrainingFlags {
  bool constant = false;       // single-class training data
  bool not_converged = false;  // iterative learner hit its epoch cap
};

class TrainedModel {
 public:
  TrainedModel(std::size_t algorithm_id, std::uint64_t seed, TrainingFlags flags,
               std::vector<FeatureSpec> schema, std::size_t n_classes,
               std::shared_ptr<const Classifier> impl);

  std::size_t algorithm_id() const { return algorithm_id_; }
  std::uint64_t training_seed() const { return seed_; }
  const TrainingFlags& flags() const { return flags_; }
  std::size_t n_classes() const { return n_classes_; }

  // Throws SchemaError when `x` does not conform to the training schema.
  int predict(std::span<const double> x) const;

 private:
  std::size_t algorithm_id_;
  std::uint64_t seed_;
  TrainingFlags flags_;
  std::shared_ptr<const std::vector<FeatureSpec>> schema_;
  std::size_t n_classes_;
  std::shared_ptr<const Classifier> impl_;
};

// Trains on every object of `train_data` (callers pass the train side).
TrainedModel train(const Configuration& config, const Dataset& train_data,
                   std::uint64_t seed);

inline int predict(const TrainedModel& model, std::span<const double> x) {
  return model.predict(x);
}

// Mean 0-1 loss of `model` over every object of `data`.
double zero_one_loss(const TrainedModel& model, const Dataset& data);

// Trains on the train side of `d`, returns the mean 0-1 loss on its test side.
double empirical_risk(const Configuration& config, const Dataset& d, std::uint64_t seed);

// Same, for callers that already hold the two sides.
double empirical_risk(const Configuration& config, const Dataset& train_side,
                      const Dataset& test_side, std::uint64_t seed);

// Risk of always predicting the train side's majority class.
double majority_class_risk(const Dataset& d);

}  // namespace massah
