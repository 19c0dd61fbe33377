// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/hyperparameters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

namespace massah {

ParamSpec ParamSpec::categorical(std::string name, std::vector<std::string> choices) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = ParamKind::kCategorical;
  p.choices = std::move(choices);
  return p;
}

ParamSpec ParamSpec::integer(std::string name, long lo, long hi) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = ParamKind::kInteger;
  p.lo = static_cast<double>(lo);
  p.hi = static_cast<double>(hi);
  return p;
}

ParamSpec ParamSpec::real(std::string name, double lo, double hi, bool log_scale) {
  ParamSpec p;
  p.name = std::move(name);
  p.kind = ParamKind::kReal;
  p.lo = lo;
  p.hi = hi;
  p.log_scale = log_scale;
  return p;
}

std::size_t ParamSpec::cardinality() const {
  switch (kind) {
    case ParamKind::kCategorical:
      return choices.size();
    case ParamKind::kInteger:
      return static_cast<std::size_t>(hi - lo) + 1;
    case ParamKind::kReal:
      return lo == hi ? 1 : 0;
  }
  return 0;
}

bool ParamSpec::contains(double value) const {
  if (!std::isfinite(value)) return false;
  switch (kind) {
    case ParamKind::kCategorical:
      return value >= 0 && value < static_cast<double>(choices.size()) &&
             value == std::floor(value);
    case ParamKind::kInteger:
      return value >= lo && value <= hi && value == std::floor(value);
    case ParamKind::kReal:
      return value >= lo && value <= hi;
  }
  return false;
}

double ParamSpec::to_unit(double value) const {
  if (is_categorical()) {
    return choices.size() <= 1 ? 0.0 : value / static_cast<double>(choices.size() - 1);
  }
  if (hi == lo) return 0.0;
  if (log_scale) return (std::log(value) - std::log(lo)) / (std::log(hi) - std::log(lo));
  return (value - lo) / (hi - lo);
}

double ParamSpec::from_unit(double unit) const {
  unit = std::clamp(unit, 0.0, 1.0);
  if (is_categorical()) {
    return std::round(unit * static_cast<double>(choices.size() - 1));
  }
  double v = log_scale ? std::exp(std::log(lo) + unit * (std::log(hi) - std::log(lo)))
                       : lo + unit * (hi - lo);
  if (kind == ParamKind::kInteger) v = std::round(v);
  return std::clamp(v, lo, hi);
}

std::string ParamSpec::format(double value) const {
  if (is_categorical()) return choices.at(static_cast<std::size_t>(value));
  if (kind == ParamKind::kInteger) return std::to_string(static_cast<long long>(value));
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

HyperparameterSpace::HyperparameterSpace(std::vector<ParamSpec> params)
    : params_(std::move(params)) {
  std::set<std::string> names;
  for (const auto& p : params_) {
    if (!names.insert(p.name).second) {
      throw std::invalid_argument("duplicate hyperparameter name: " + p.name);
    }
    if (p.is_categorical()) {
      if (p.choices.empty()) throw std::invalid_argument("empty choice list: " + p.name);
      std::set<std::string> uniq(p.choices.begin(), p.choices.end());
      if (uniq.size() != p.choices.size()) {
        throw std::invalid_argument("duplicate choice in " + p.name);
      }
    } else {
      if (!(p.lo <= p.hi) || !std::isfinite(p.lo) || !std::isfinite(p.hi)) {
        throw std::invalid_argument("degenerate range: " + p.name);
      }
      if (p.kind == ParamKind::kInteger &&
          (p.lo != std::floor(p.lo) || p.hi != std::floor(p.hi))) {
        throw std::invalid_argument("non-integral bounds: " + p.name);
      }
      if (p.log_scale && p.lo <= 0) {
        throw std::invalid_argument("log-scaled range must be positive: " + p.name);
      }
    }
  }
}

std::size_t HyperparameterSpace::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name == name) return i;
  }
  throw std::out_of_range("no hyperparameter named " + name);
}

std::size_t HyperparameterSpace::n_categorical() const {
  return static_cast<std::size_t>(std::count_if(
      params_.begin(), params_.end(), [](const ParamSpec& p) { return p.is_categorical(); }));
}

bool HyperparameterSpace::validates(const Configuration& c) const {
  if (c.values.size() != params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].contains(c.values[i])) return false;
  }
  return true;
}

void HyperparameterSpace::validate(const Configuration& c) const {
  if (c.values.size() != params_.size()) {
    throw std::invalid_argument("configuration has " + std::to_string(c.values.size()) +
                                " values, space has " + std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (!params_[i].contains(c.values[i])) {
      throw std::invalid_argument("value out of domain for " + params_[i].name);
    }
  }
}

Configuration HyperparameterSpace::sample(std::size_t algorithm_id, Rng& rng) const {
  Configuration c{algorithm_id, {}};
  c.values.reserve(params_.size());
  for (const auto& p : params_) {
    switch (p.kind) {
      case ParamKind::kCategorical:
        c.values.push_back(static_cast<double>(rng.below(p.choices.size())));
        break;
      case ParamKind::kInteger:
        c.values.push_back(static_cast<double>(
            rng.integer(static_cast<std::int64_t>(p.lo), static_cast<std::int64_t>(p.hi))));
        break;
      case ParamKind::kReal:
        c.values.push_back(p.from_unit(rng.uniform()));
        break;
    }
  }
  return c;
}

Configuration HyperparameterSpace::default_configuration(std::size_t algorithm_id) const {
  Configuration c{algorithm_id, {}};
  for (const auto& p : params_) c.values.push_back(p.is_categorical() ? 0.0 : p.from_unit(0.5));
  return c;
}

std::size_t HyperparameterSpace::encoded_width() const {
  std::size_t w = 0;
  for (const auto& p : params_) w += p.is_categorical() ? p.choices.size() : 1;
  return w;
}

std::vector<double> HyperparameterSpace::encode(const Configuration& c) const {
  std::vector<double> out;
  out.reserve(encoded_width());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto& p = params_[i];
    if (p.is_categorical()) {
      for (std::size_t k = 0; k < p.choices.size(); ++k) {
        out.push_back(static_cast<std::size_t>(c.values[i]) == k ? 1.0 : 0.0);
      }
    } else {
      out.push_back(p.to_unit(c.values[i]));
    }
  }
  return out;
}

std::string HyperparameterSpace::describe(const Configuration& c) const {
  std::string out;
  for (std::size_t i = 0; i < params_.size() && i < c.values.size(); ++i) {
    if (i) out += ' ';
    out += params_[i].name + '=' + params_[i].format(c.values[i]);
  }
  return out;
}

}  // namespace massah
