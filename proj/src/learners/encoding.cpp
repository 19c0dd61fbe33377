// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>

#include "models.hpp"

namespace massah::detail {

int argmax_lowest(std::span<const double> scores) {
  int best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

FeatureEncoder::FeatureEncoder(const Dataset& train, bool impute) : impute_(impute) {
  const std::size_t n = train.size();
  for (std::size_t j = 0; j < train.n_features(); ++j) {
    const FeatureSpec& f = train.features()[j];
    Column col{f.categorical(), width_, f.categorical() ? f.arity() : 1, 0.0, 1.0, 0.0};
    if (f.categorical()) {
      std::vector<std::size_t> counts(f.arity(), 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = train.row(i)[j];
        if (!is_missing(v)) ++counts[static_cast<std::size_t>(v)];
      }
      col.fill = static_cast<double>(std::max_element(counts.begin(), counts.end()) -
                                     counts.begin());
    } else {
      std::vector<double> present;
      present.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const double v = train.row(i)[j];
        if (!is_missing(v)) present.push_back(v);
      }
      if (!present.empty()) {
        double mean = 0.0;
        for (double v : present) mean += v;
        mean /= static_cast<double>(present.size());
        double var = 0.0;
        for (double v : present) var += (v - mean) * (v - mean);
        var /= static_cast<double>(present.size());
        col.center = mean;
        col.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
        std::sort(present.begin(), present.end());
        const std::size_t m = present.size();
        col.fill = m % 2 ? present[m / 2] : 0.5 * (present[m / 2 - 1] + present[m / 2]);
      }
    }
    width_ += col.arity;
    columns_.push_back(col);
  }
}

void FeatureEncoder::encode(std::span<const double> x, std::span<double> out) const {
  for (const Column& col : columns_) {
    double v = x[&col - columns_.data()];
    const bool missing = is_missing(v);
    if (missing && impute_) v = col.fill;
    if (col.categorical) {
      for (std::size_t k = 0; k < col.arity; ++k) {
        out[col.offset + k] = (missing && !impute_) ? kMissing
                              : (static_cast<std::size_t>(v) == k ? 1.0 : 0.0);
      }
    } else {
      out[col.offset] = (missing && !impute_) ? kMissing : (v - col.center) / col.scale;
    }
  }
}

std::vector<double> FeatureEncoder::encode(std::span<const double> x) const {
  std::vector<double> out(width_);
  encode(x, out);
  return out;
}

std::vector<double> FeatureEncoder::encode_all(const Dataset& d) const {
  std::vector<double> out(d.size() * width_);
  for (std::size_t i = 0; i < d.size(); ++i) {
    encode(d.row(i), std::span<double>(out.data() + i * width_, width_));
  }
  return out;
}

}  // namespace massah::detail
