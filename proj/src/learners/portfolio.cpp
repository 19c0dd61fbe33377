// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>

#include "massah/learners.hpp"
#include "models.hpp"

namespace massah {
namespace {

Portfolio make_portfolio() {
  using P = ParamSpec;
  Portfolio p;
  // 4 categorical + 1 numerical.
  p.push_back({0, "knn",
               HyperparameterSpace({
                   P::categorical("metric", {"euclidean", "manhattan", "chebyshev"}),
                   P::categorical("weighting", {"uniform", "distance"}),
                   P::categorical("tie_break", {"lowest_label", "nearest"}),
                   P::categorical("missing", {"impute", "skip"}),
                   P::integer("k", 1, 30),
               })});
  // 0 categorical + 1 numerical: the L2 penalty.
  p.push_back({1, "logistic_regression",
               HyperparameterSpace({P::real("l2", 1e-6, 10.0, /*log_scale=*/true)})});
  // CART stand-in for C4.5: 2 categorical + 2 numerical.
  p.push_back({2, "decision_tree",
               HyperparameterSpace({
                   P::categorical("criterion", {"gini", "entropy", "gain_ratio"}),
                   P::categorical("class_weight", {"none", "balanced"}),
                   P::integer("max_depth", 1, 25),
                   P::integer("min_samples_leaf", 1, 50),
               })});
  // 2 categorical + 3 numerical.
  p.push_back({3, "random_forest",
               HyperparameterSpace({
                   P::categorical("criterion", {"gini", "entropy"}),
                   P::categorical("bootstrap", {"true", "false"}),
                   P::integer("n_trees", 5, 50),
                   P::real("max_features", 0.1, 1.0),
                   P::integer("max_depth", 1, 25),
               })});
  // 5 categorical + 2 numerical.
  p.push_back({4, "perceptron",
               HyperparameterSpace({
                   P::categorical("averaged", {"true", "false"}),
                   P::categorical("shuffle", {"true", "false"}),
                   P::categorical("schedule", {"constant", "inverse"}),
                   P::categorical("margin", {"zero", "unit"}),
                   P::categorical("bias", {"true", "false"}),
                   P::integer("epochs", 1, detail::kMaxEpochs),
                   P::real("learning_rate", 1e-3, 1.0, /*log_scale=*/true),
               })});
  return p;
}

}  // namespace

const Portfolio& portfolio() {
  static const Portfolio p = make_portfolio();
  return p;
}

const AlgorithmDescriptor& algorithm(std::size_t id) {
  const Portfolio& p = portfolio();
  if (id >= p.size()) throw std::out_of_range("unknown algorithm id " + std::to_string(id));
  return p[id];
}

std::size_t algorithm_id(const std::string& name) {
  for (const auto& a : portfolio()) {
    if (a.name == name) return a.id;
  }
  throw std::out_of_range("unknown algorithm " + name);
}

namespace detail {

double param(const Configuration& c, const std::string& name) {
  const HyperparameterSpace& space = algorithm(c.algorithm_id).space;
  return c.values.at(space.index_of(name));
}

std::string choice(const Configuration& c, const std::string& name) {
  const HyperparameterSpace& space = algorithm(c.algorithm_id).space;
  const std::size_t i = space.index_of(name);
  return space[i].choices.at(static_cast<std::size_t>(c.values.at(i)));
}

}  // namespace detail

TrainedModel::TrainedModel(std::size_t algorithm_id, std::uint64_t seed, TrainingFlags flags,
                           std::vector<FeatureSpec> schema, std::size_t n_classes,
                           std::shared_ptr<const Classifier> impl)
    : algorithm_id_(algorithm_id),
      seed_(seed),
      flags_(flags),
      schema_(std::make_shared<const std::vector<FeatureSpec>>(std::move(schema))),
      n_classes_(n_classes),
      impl_(std::move(impl)) {}

int TrainedModel::predict(std::span<const double> x) const {
  const auto& schema = *schema_;
  if (x.size() != schema.size()) {
    throw SchemaError("expected " + std::to_string(schema.size()) + " features, got " +
                      std::to_string(x.size()));
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = x[j];
    if (is_missing(v)) continue;
    if (!std::isfinite(v)) throw SchemaError("non-finite value for " + schema[j].name);
    if (schema[j].categorical() &&
        (v < 0 || v >= static_cast<double>(schema[j].arity()) || v != std::floor(v))) {
      throw SchemaError("category index out of range for " + schema[j].name);
    }
  }
  return impl_->predict(x);
}

TrainedModel train(const Configuration& config, const Dataset& train_data,
                   std::uint64_t seed) {
  const AlgorithmDescriptor& algo = algorithm(config.algorithm_id);
  algo.space.validate(config);
  if (train_data.size() == 0) throw std::invalid_argument("empty training set");

  TrainingFlags flags;
  const auto counts = train_data.class_counts();
  const auto present = std::count_if(counts.begin(), counts.end(),
                                     [](std::size_t c) { return c > 0; });
  detail::ClassifierPtr impl;
  if (present < 2) {
    flags.constant = true;
    impl = std::make_shared<detail::ConstantClassifier>(
        static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin()));
  } else {
    Rng rng(Rng::derive(seed, config.algorithm_id));
    switch (static_cast<Algorithm>(config.algorithm_id)) {
      case Algorithm::kKnn:
        impl = detail::train_knn(config, train_data, flags);
        break;
      case Algorithm::kLogisticRegression:
        impl = detail::train_logistic(config, train_data, flags);
        break;
      case Algorithm::kDecisionTree:
        impl = detail::train_decision_tree(config, train_data, rng);
        break;
      case Algorithm::kRandomForest:
        impl = detail::train_random_forest(config, train_data, rng);
        break;
      case Algorithm::kPerceptron:
        impl = detail::train_perceptron(config, train_data, rng, flags);
        break;
    }
  }
  return TrainedModel(config.algorithm_id, seed, flags, train_data.features(),
                      train_data.n_classes(), std::move(impl));
}

double zero_one_loss(const TrainedModel& model, const Dataset& data) {
  if (data.size() == 0) throw std::invalid_argument("empty evaluation set");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (model.predict(data.row(i)) != data.label(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double empirical_risk(const Configuration& config, const Dataset& train_side,
                      const Dataset& test_side, std::uint64_t seed) {
  return zero_one_loss(train(config, train_side, seed), test_side);
}

double empirical_risk(const Configuration& config, const Dataset& d, std::uint64_t seed) {
  return empirical_risk(config, d.train_part(), d.test_part(), seed);
}

double majority_class_risk(const Dataset& d) {
  const Dataset train_side = d.train_part();
  const Dataset test_side = d.test_part();
  const auto counts = train_side.class_counts();
  const int majority =
      static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < test_side.size(); ++i) wrong += test_side.label(i) != majority;
  return static_cast<double>(wrong) / static_cast<double>(test_side.size());
}

}  // namespace massah
