// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "models.hpp"

namespace massah::detail {
namespace {

enum class Metric { kEuclidean, kManhattan, kChebyshev };

class KnnClassifier final : public Classifier {
 public:
  KnnClassifier(FeatureEncoder encoder, std::vector<double> rows, std::vector<int> labels,
                std::size_t n_classes, Metric metric, bool distance_weighted,
                bool tie_to_nearest, std::size_t k)
      : encoder_(std::move(encoder)),
        rows_(std::move(rows)),
        labels_(std::move(labels)),
        n_classes_(n_classes),
        metric_(metric),
        distance_weighted_(distance_weighted),
        tie_to_nearest_(tie_to_nearest),
        k_(std::min(k, labels_.size())) {}

  int predict(std::span<const double> x) const override {
    const std::vector<double> q = encoder_.encode(x);
    const std::size_t w = encoder_.width();
    const std::size_t n = labels_.size();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = {distance(q, std::span<const double>(rows_.data() + i * w, w)), i};
    }
    // Ties in distance resolve to the earlier training object.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k_), dist.end());

    std::vector<double> votes(n_classes_, 0.0);
    for (std::size_t r = 0; r < k_; ++r) {
      const double weight = distance_weighted_ ? 1.0 / (dist[r].first + 1e-9) : 1.0;
      votes[static_cast<std::size_t>(labels_[dist[r].second])] += weight;
    }
    const double top = *std::max_element(votes.begin(), votes.end());
    if (tie_to_nearest_) {
      for (std::size_t r = 0; r < k_; ++r) {
        const int y = labels_[dist[r].second];
        if (votes[static_cast<std::size_t>(y)] == top) return y;
      }
    }
    return argmax_lowest(votes);
  }

 private:
  // Dimensions missing on either side are skipped; the sum is rescaled to
  // the full width so partially observed rows stay comparable.
  double distance(std::span<const double> a, std::span<const double> b) const {
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (is_missing(a[j]) || is_missing(b[j])) continue;
      const double d = std::abs(a[j] - b[j]);
      ++used;
      switch (metric_) {
        case Metric::kEuclidean:
          acc += d * d;
          break;
        case Metric::kManhattan:
          acc += d;
          break;
        case Metric::kChebyshev:
          acc = std::max(acc, d);
          break;
      }
    }
    if (used == 0) return std::numeric_limits<double>::max();
    if (metric_ != Metric::kChebyshev && used < a.size()) {
      acc *= static_cast<double>(a.size()) / static_cast<double>(used);
    }
    return metric_ == Metric::kEuclidean ? std::sqrt(acc) : acc;
  }

  FeatureEncoder encoder_;
  std::vector<double> rows_;
  std::vector<int> labels_;
  std::size_t n_classes_;
  Metric metric_;
  bool distance_weighted_;
  bool tie_to_nearest_;
  std::size_t k_;
};

}  // namespace

ClassifierPtr train_knn(const Configuration& c, const Dataset& d, TrainingFlags&) {
  const std::string metric = choice(c, "metric");
  const Metric m = metric == "manhattan"   ? Metric::kManhattan
                   : metric == "chebyshev" ? Metric::kChebyshev
                                           : Metric::kEuclidean;
  const bool impute = choice(c, "missing") == "impute";
  FeatureEncoder encoder(d, impute);
  std::vector<double> rows = encoder.encode_all(d);
  return std::make_shared<KnnClassifier>(
      std::move(encoder), std::move(rows), d.labels(), d.n_classes(), m,
      choice(c, "weighting") == "distance", choice(c, "tie_break") == "nearest",
      static_cast<std::size_t>(param(c, "k")));
}

}  // namespace massah::detail
