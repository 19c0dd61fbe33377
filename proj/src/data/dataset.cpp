// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>

#include "massah/random.hpp"

namespace massah {

std::optional<std::size_t> FeatureSpec::category_index(
    const std::string& value) const {
  const auto it = std::find(categories.begin(), categories.end(), value);
  if (it == categories.end()) return std::nullopt;
  return static_cast<std::size_t>(it - categories.begin());
}

bool operator==(const FeatureSpec& a, const FeatureSpec& b) {
  return a.name == b.name && a.kind == b.kind && a.categories == b.categories &&
         a.missing_allowed == b.missing_allowed;
}

bool operator==(const TrainTestSplit& a, const TrainTestSplit& b) {
  return a.train == b.train && a.test == b.test;
}

namespace {

void check_split(const TrainTestSplit& split, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (const auto* side : {&split.train, &split.test}) {
    for (std::size_t i : *side) {
      if (i >= n) throw std::invalid_argument("split index out of range");
      if (seen[i]) throw std::invalid_argument("split sides overlap");
      seen[i] = 1;
    }
  }
  if (split.train.size() + split.test.size() != n) {
    throw std::invalid_argument("split does not cover every object");
  }
}

}  // namespace

Dataset::Dataset(std::string name, std::vector<FeatureSpec> features,
                 std::vector<double> values, std::vector<int> labels,
                 std::vector<std::string> class_names,
                 std::optional<TrainTestSplit> split)
    : name_(std::move(name)),
      features_(std::move(features)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      class_names_(std::move(class_names)),
      split_(std::move(split)) {
  std::set<std::string> names;
  for (const auto& f : features_) {
    if (!names.insert(f.name).second) {
      throw std::invalid_argument("duplicate feature name: " + f.name);
    }
    if (f.categorical()) {
      if (f.categories.empty()) {
        throw std::invalid_argument("categorical feature without categories: " + f.name);
      }
      std::set<std::string> uniq(f.categories.begin(), f.categories.end());
      if (uniq.size() != f.categories.size()) {
        throw std::invalid_argument("duplicate category in feature: " + f.name);
      }
    }
  }
  if (values_.size() != labels_.size() * features_.size()) {
    throw std::invalid_argument("value matrix does not match object count");
  }
  for (int y : labels_) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names_.size()) {
      throw std::invalid_argument("label out of range");
    }
  }
  const std::size_t d = features_.size();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const FeatureSpec& f = features_[i % d];
    const double v = values_[i];
    if (is_missing(v)) {
      if (!f.missing_allowed) {
        throw std::invalid_argument("missing value in feature " + f.name);
      }
      continue;
    }
    if (!std::isfinite(v)) {
      throw std::invalid_argument("non-finite value in feature " + f.name);
    }
    if (f.categorical() &&
        (v < 0 || v >= static_cast<double>(f.arity()) || v != std::floor(v))) {
      throw std::invalid_argument("category index out of range in " + f.name);
    }
  }
  if (split_) check_split(*split_, labels_.size());
}

std::size_t Dataset::n_categorical() const {
  return static_cast<std::size_t>(std::count_if(
      features_.begin(), features_.end(),
      [](const FeatureSpec& f) { return f.categorical(); }));
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  std::vector<double> values;
  values.reserve(rows.size() * n_features());
  std::vector<int> labels;
  labels.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= size()) throw std::out_of_range("subset row out of range");
    const auto x = row(r);
    values.insert(values.end(), x.begin(), x.end());
    labels.push_back(labels_[r]);
  }
  return Dataset(name_, features_, std::move(values), std::move(labels),
                 class_names_);
}

Dataset Dataset::with_split(TrainTestSplit split) const {
  Dataset copy = *this;
  check_split(split, size());
  copy.split_ = std::move(split);
  return copy;
}

Dataset Dataset::train_part() const {
  if (!split_) throw std::logic_error("dataset " + name_ + " has no split");
  return subset(split_->train);
}

Dataset Dataset::test_part() const {
  if (!split_) throw std::logic_error("dataset " + name_ + " has no split");
  return subset(split_->test);
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes(), 0);
  for (int y : labels_) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

bool operator==(const Dataset& a, const Dataset& b) {
  if (a.name_ != b.name_ || a.features_ != b.features_ ||
      a.labels_ != b.labels_ || a.class_names_ != b.class_names_ ||
      a.split_ != b.split_ || a.values_.size() != b.values_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const double x = a.values_[i];
    const double y = b.values_[i];
    if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
  }
  return true;
}

Dataset load_dataset(const std::string& path,
                     const std::optional<std::string>& test_path,
                     const CsvOptions& csv) {
  std::string ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".arff") {
    return test_path ? load_arff(path, *test_path) : load_arff(path);
  }
  return test_path ? load_csv(path, *test_path, csv) : load_csv(path, csv);
}

std::size_t test_size_for(std::size_t n, double test_fraction) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  // The epsilon absorbs representation error such as 10 * 0.3 = 3.0000000000000004.
  const double raw = static_cast<double>(n) * test_fraction;
  const auto test = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  if (test == 0 || test >= n) {
    throw std::invalid_argument("test fraction " + std::to_string(test_fraction) +
                                " leaves an empty side for " + std::to_string(n) +
                                " objects");
  }
  return test;
}

Dataset split_train_test(const Dataset& d, double test_fraction,
                         std::uint64_t seed, bool stratified,
                         bool override_existing) {
  if (d.size() < 2) throw std::invalid_argument("need at least 2 objects to split");
  if (d.split() && !override_existing) {
    throw std::invalid_argument("dataset " + d.name() + " already has a split");
  }
  const std::size_t n_test = test_size_for(d.size(), test_fraction);
  Rng rng(Rng::derive(seed, 0x5b1f));
  std::vector<char> is_test(d.size(), 0);

  if (!stratified) {
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order.begin(), order.end());
    for (std::size_t i = 0; i < n_test; ++i) is_test[order[i]] = 1;
  } else {
    // Per-class quotas by largest remainder so they sum to n_test exactly.
    std::vector<std::vector<std::size_t>> by_class(d.n_classes());
    for (std::size_t i = 0; i < d.size(); ++i) {
      by_class[static_cast<std::size_t>(d.label(i))].push_back(i);
    }
    const double frac = static_cast<double>(n_test) / static_cast<double>(d.size());
    std::vector<std::size_t> quota(by_class.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      const double ideal = frac * static_cast<double>(by_class[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(ideal + 1e-12));
      assigned += quota[c];
      remainders.emplace_back(-(ideal - static_cast<double>(quota[c])), c);
    }
    std::stable_sort(remainders.begin(), remainders.end());
    for (std::size_t k = 0; assigned < n_test && k < remainders.size(); ++k) {
      const std::size_t c = remainders[k].second;
      if (quota[c] < by_class[c].size()) {
        ++quota[c];
        ++assigned;
      }
    }
    for (std::size_t c = 0; c < by_class.size(); ++c) {
      auto& members = by_class[c];
      rng.shuffle(members.begin(), members.end());
      for (std::size_t k = 0; k < quota[c]; ++k) is_test[members[k]] = 1;
    }
  }

  TrainTestSplit split;
  for (std::size_t i = 0; i < d.size(); ++i) {
    (is_test[i] ? split.test : split.train).push_back(i);
  }
  return d.with_split(std::move(split));
}

}  // namespace massah
