// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace massah {

// Sentinel stored for a missing feature value (ARFF "?", empty CSV cell).
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedFeatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FeatureKind { kNumerical, kCategorical };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::kNumerical;
  std::vector<std::string> categories;  // categorical only, in declared order
  bool missing_allowed = false;

  bool categorical() const { return kind == FeatureKind::kCategorical; }
  std::size_t arity() const { return categories.size(); }
  std::optional<std::size_t> category_index(const std::string& value) const;
};

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Labeled objects with mixed features. Categorical values are stored as the
// category index; missing values as kMissing. Immutable once constructed.
class Dataset {
 public:
  Dataset() = default;

  // Validates every invariant; throws std::invalid_argument on violation.
  Dataset(std::string name, std::vector<FeatureSpec> features,
          std::vector<double> values, std::vector<int> labels,
          std::vector<std::string> class_names,
          std::optional<TrainTestSplit> split = std::nullopt);

  const std::string& name() const { return name_; }
  const std::vector<FeatureSpec>& features() const { return features_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::optional<TrainTestSplit>& split() const { return split_; }

  std::size_t size() const { return labels_.size(); }
  std::size_t n_features() const { return features_.size(); }
  std::size_t n_classes() const { return class_names_.size(); }
  std::size_t n_categorical() const;
  std::size_t n_numerical() const { return n_features() - n_categorical(); }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * features_.size(), features_.size()};
  }
  int label(std::size_t i) const { return labels_[i]; }

  // Same schema, selected rows in the given order, no split.
  Dataset subset(std::span<const std::size_t> rows) const;
  Dataset with_split(TrainTestSplit split) const;
  Dataset train_part() const;
  Dataset test_part() const;

  std::vector<std::size_t> class_counts() const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::string name_;
  std::vector<FeatureSpec> features_;
  std::vector<double> values_;  // row-major, size() x n_features()
  std::vector<int> labels_;
  std::vector<std::string> class_names_;
  std::optional<TrainTestSplit> split_;
};

bool operator==(const FeatureSpec& a, const FeatureSpec& b);
bool operator==(const TrainTestSplit& a, const TrainTestSplit& b);

// Identifies the label column of a CSV by header name or 0-based index.
using ColumnRef = std::variant<std::string, std::size_t>;

struct CsvOptions {
  ColumnRef label_column = std::string("class");
  // Per-column kind overrides keyed by header name.
  std::map<std::string, FeatureKind> schema_hints;
  // Columns that may contain the missing token (empty cell). "*" allows all.
  std::vector<std::string> missing_allowed;
};

Dataset load_csv(const std::string& path, const CsvOptions& options = {});
// Predefined split: rows of `train_path` then `test_path`, one schema.
Dataset load_csv(const std::string& train_path, const std::string& test_path,
                 const CsvOptions& options = {});

Dataset load_arff(const std::string& path);
Dataset load_arff(const std::string& train_path, const std::string& test_path);

// Dispatches on extension (.arff, otherwise CSV).
Dataset load_dataset(const std::string& path,
                     const std::optional<std::string>& test_path = std::nullopt,
                     const CsvOptions& csv = {});

// Number of test objects for `n` objects at `test_fraction`: ceil(n * f).
// Throws std::invalid_argument when either side would be empty.
std::size_t test_size_for(std::size_t n, double test_fraction);

Dataset split_train_test(const Dataset& d, double test_fraction,
                         std::uint64_t seed, bool stratified,
                         bool override_existing = false);

}  // namespace massah
