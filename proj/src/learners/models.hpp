// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "massah/dataset.hpp"
#include "massah/hyperparameters.hpp"
#include "massah/learners.hpp"
#include "massah/random.hpp"

namespace massah::detail {

// One-hot categorical features, z-scored numerical features. Missing values
// become the train mode / median, or stay kMissing when `impute` is false.
class FeatureEncoder {
 public:
  FeatureEncoder(const Dataset& train, bool impute);

  std::size_t width() const { return width_; }
  void encode(std::span<const double> x, std::span<double> out) const;
  std::vector<double> encode(std::span<const double> x) const;
  // Row-major encoding of every object.
  std::vector<double> encode_all(const Dataset& d) const;

 private:
  struct Column {
    bool categorical;
    std::size_t offset;
    std::size_t arity;
    double center;  // mean (numerical)
    double scale;   // std (numerical)
    double fill;    // imputed raw value
  };
  std::vector<Column> columns_;
  std::size_t width_ = 0;
  bool impute_;
};

class ConstantClassifier final : public Classifier {
 public:
  explicit ConstantClassifier(int label) : label_(label) {}
  int predict(std::span<const double>) const override { return label_; }

 private:
  int label_;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

ClassifierPtr train_knn(const Configuration& c, const Dataset& d, TrainingFlags& flags);
ClassifierPtr train_logistic(const Configuration& c, const Dataset& d, TrainingFlags& flags);
ClassifierPtr train_perceptron(const Configuration& c, const Dataset& d, Rng& rng,
                               TrainingFlags& flags);
ClassifierPtr train_decision_tree(const Configuration& c, const Dataset& d, Rng& rng);
ClassifierPtr train_random_forest(const Configuration& c, const Dataset& d, Rng& rng);

// Hard cap on epochs for the iterative learners.
inline constexpr int kMaxEpochs = 200;

int argmax_lowest(std::span<const double> scores);

// Value of the named hyperparameter in `c` (choice index for categoricals).
double param(const Configuration& c, const std::string& name);
std::string choice(const Configuration& c, const std::string& name);

}  // namespace massah::detail
