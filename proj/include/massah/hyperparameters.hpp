// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "massah/random.hpp"

namespace massah {

enum class ParamKind { kCategorical, kInteger, kReal };

// One dimension of a learner's hyperparameter space.
struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  std::vector<std::string> choices;  // categorical only
  double lo = 0.0;                   // integer / real only
  double hi = 0.0;
  bool log_scale = false;            // real only, requires lo > 0

  static ParamSpec categorical(std::string name, std::vector<std::string> choices);
  static ParamSpec integer(std::string name, long lo, long hi);
  static ParamSpec real(std::string name, double lo, double hi, bool log_scale = false);

  bool is_categorical() const { return kind == ParamKind::kCategorical; }
  bool is_numeric() const { return !is_categorical(); }
  // Number of values in a discrete domain; 0 for real ranges.
  std::size_t cardinality() const;
  bool contains(double value) const;

  // Maps a value to [0, 1] (log-space for log-scaled reals) and back.
  double to_unit(double value) const;
  double from_unit(double unit) const;

  std::string format(double value) const;
};

// A point in a space: categorical values are choice indices, integers are
// stored as exact doubles.
struct Configuration {
  std::size_t algorithm_id = 0;
  std::vector<double> values;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

class HyperparameterSpace {
 public:
  HyperparameterSpace() = default;
  // Throws std::invalid_argument on duplicate names or degenerate domains.
  explicit HyperparameterSpace(std::vector<ParamSpec> params);

  const std::vector<ParamSpec>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  bool empty() const { return params_.empty(); }
  const ParamSpec& operator[](std::size_t i) const { return params_[i]; }
  std::size_t index_of(const std::string& name) const;

  std::size_t n_categorical() const;
  std::size_t n_numeric() const { return size() - n_categorical(); }

  bool validates(const Configuration& c) const;
  // Throws std::invalid_argument naming the offending parameter.
  void validate(const Configuration& c) const;

  Configuration sample(std::size_t algorithm_id, Rng& rng) const;
  // Midpoint / first choice of every domain.
  Configuration default_configuration(std::size_t algorithm_id) const;

  // Unit-cube encoding used by the surrogate: categorical params one-hot,
  // numeric params via ParamSpec::to_unit.
  std::size_t encoded_width() const;
  std::vector<double> encode(const Configuration& c) const;

  std::string describe(const Configuration& c) const;

 private:
  std::vector<ParamSpec> params_;
};

}  // namespace massah
