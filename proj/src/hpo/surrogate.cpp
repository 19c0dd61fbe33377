// Apache License, Version 2.0, refer to LICENSE.txt

#include "massah/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "massah/random.hpp"

namespace massah {

double Prediction::stddev() const { return std::sqrt(std::max(variance, 0.0)); }

double expected_improvement(double mean, double sigma, double best) {
  if (sigma < 0 || std::isnan(sigma)) throw std::invalid_argument("negative sigma");
  if (sigma == 0.0) return std::max(best - mean, 0.0);
  const double u = (best - mean) / sigma;
  const double pdf = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
  return std::max(sigma * (u * cdf + pdf), 0.0);
}

namespace {

// Mean that is exact when every value is identical.
double stable_mean(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (*lo == *hi) return *lo;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

SurrogateModel SurrogateModel::fit(const HyperparameterSpace& space,
                                   std::span<const Observation> history, std::uint64_t seed,
                                   const SurrogateOptions& options) {
  if (history.empty()) throw std::invalid_argument("surrogate needs at least one observation");
  SurrogateModel model;
  model.space_ = space;

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (const auto& o : history) {
    x.push_back(space.encode(o.config));
    y.push_back(o.risk);
  }
  const std::size_t n = history.size();
  const std::size_t width = space.encoded_width();
  Rng rng(Rng::derive(seed, 0x5a77));

  for (std::size_t t = 0; t < options.n_trees; ++t) {
    std::vector<std::size_t> sample(n);
    for (auto& s : sample) s = rng.below(n);

    Tree tree;
    // Explicit stack: (node index, rows, depth).
    struct Task {
      std::size_t node;
      std::vector<std::size_t> rows;
      int depth;
    };
    std::vector<Task> stack;
    tree.emplace_back();
    stack.push_back({0, std::move(sample), 0});
    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      std::vector<double> targets;
      for (std::size_t r : task.rows) targets.push_back(y[r]);
      tree[task.node].value = stable_mean(targets);

      const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
      if (task.rows.size() < options.min_samples_split || task.depth >= options.max_depth ||
          *lo == *hi) {
        continue;
      }

      // Best variance-reduction split over all encoded dimensions.
      double best_score = 0.0;
      int best_feature = -1;
      double best_threshold = 0.0;
      const double total = std::accumulate(targets.begin(), targets.end(), 0.0);
      const double total_sq = std::inner_product(targets.begin(), targets.end(),
                                                 targets.begin(), 0.0);
      const auto m = static_cast<double>(task.rows.size());
      const double parent_sse = total_sq - total * total / m;
      std::vector<std::size_t> order = task.rows;
      for (std::size_t f = 0; f < width; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return x[a][f] < x[b][f] || (x[a][f] == x[b][f] && a < b);
        });
        double left_sum = 0.0;
        double left_sq = 0.0;
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          const double v = y[order[i]];
          left_sum += v;
          left_sq += v * v;
          if (x[order[i]][f] == x[order[i + 1]][f]) continue;
          const auto nl = static_cast<double>(i + 1);
          const double nr = m - nl;
          const double right_sum = total - left_sum;
          const double right_sq = total_sq - left_sq;
          const double sse = (left_sq - left_sum * left_sum / nl) +
                             (right_sq - right_sum * right_sum / nr);
          const double score = parent_sse - sse;
          if (score > best_score + 1e-15) {
            best_score = score;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (x[order[i]][f] + x[order[i + 1]][f]);
          }
        }
      }
      if (best_feature < 0) continue;

      std::vector<std::size_t> left, right;
      for (std::size_t r : task.rows) {
        (x[r][static_cast<std::size_t>(best_feature)] < best_threshold ? left : right)
            .push_back(r);
      }
      const std::size_t l = tree.size();
      tree.emplace_back();
      const std::size_t rr = tree.size();
      tree.emplace_back();
      tree[task.node].feature = best_feature;
      tree[task.node].threshold = best_threshold;
      tree[task.node].left = l;
      tree[task.node].right = rr;
      stack.push_back({rr, std::move(right), task.depth + 1});
      stack.push_back({l, std::move(left), task.depth + 1});
    }
    model.trees_.push_back(std::move(tree));
  }
  return model;
}

double SurrogateModel::tree_predict(const Tree& t, std::span<const double> x) {
  std::size_t at = 0;
  while (t[at].feature >= 0) {
    at = x[static_cast<std::size_t>(t[at].feature)] < t[at].threshold ? t[at].left
                                                                       : t[at].right;
  }
  return t[at].value;
}

Prediction SurrogateModel::predict(const Configuration& c) const {
  const std::vector<double> x = space_.encode(c);
  std::vector<double> per_tree;
  per_tree.reserve(trees_.size());
  for (const Tree& t : trees_) per_tree.push_back(tree_predict(t, x));
  Prediction p;
  p.mean = stable_mean(per_tree);
  const auto [lo, hi] = std::minmax_element(per_tree.begin(), per_tree.end());
  if (*lo != *hi) {
    double ss = 0.0;
    for (double v : per_tree) ss += (v - p.mean) * (v - p.mean);
    p.variance = ss / static_cast<double>(per_tree.size());
  }
  return p;
}

}  // namespace massah
