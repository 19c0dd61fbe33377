// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>
#include <numeric>

#include "models.hpp"

namespace massah::detail {
namespace {

enum class Criterion { kGini, kEntropy, kGainRatio };

Criterion parse_criterion(const std::string& s) {
  if (s == "entropy") return Criterion::kEntropy;
  if (s == "gain_ratio") return Criterion::kGainRatio;
  return Criterion::kGini;
}

double impurity(std::span<const double> counts, double total, Criterion criterion) {
  if (total <= 0) return 0.0;
  double acc = 0.0;
  if (criterion == Criterion::kGini) {
    acc = 1.0;
    for (double c : counts) acc -= (c / total) * (c / total);
    return acc;
  }
  for (double c : counts) {
    if (c > 0) acc -= (c / total) * std::log2(c / total);
  }
  return acc;
}

struct Node {
  // Internal nodes: feature >= 0. Numerical: x < threshold goes left.
  // Categorical: x == category goes left.
  int feature = -1;
  bool categorical = false;
  double threshold = 0.0;
  bool missing_left = true;
  std::size_t left = 0;
  std::size_t right = 0;
  int label = 0;
};

struct TreeOptions {
  Criterion criterion = Criterion::kGini;
  int max_depth = 10;
  std::size_t min_samples_leaf = 1;
  double max_features = 1.0;  // fraction of features examined per node
  bool balanced = false;
};

class Tree {
 public:
  int predict(std::span<const double> x) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
      const Node& n = nodes_[at];
      const double v = x[static_cast<std::size_t>(n.feature)];
      bool left;
      if (is_missing(v)) {
        left = n.missing_left;
      } else if (n.categorical) {
        left = v == n.threshold;
      } else {
        left = v < n.threshold;
      }
      at = left ? n.left : n.right;
    }
    return nodes_[at].label;
  }

  static Tree build(const Dataset& d, std::span<const std::size_t> rows,
                    const TreeOptions& options, Rng& rng) {
    Tree t;
    Builder b{d, options, rng, t.nodes_, {}};
    b.class_weight.assign(d.n_classes(), 1.0);
    if (options.balanced) {
      std::vector<double> counts(d.n_classes(), 0.0);
      for (std::size_t r : rows) counts[static_cast<std::size_t>(d.label(r))] += 1.0;
      for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] > 0) {
          b.class_weight[c] = static_cast<double>(rows.size()) /
                              (static_cast<double>(counts.size()) * counts[c]);
        }
      }
    }
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    b.grow(idx, 0);
    return t;
  }

 private:
  struct Split {
    double gain = 0.0;
    int feature = -1;
    bool categorical = false;
    double threshold = 0.0;
  };

  struct Builder {
    const Dataset& d;
    const TreeOptions& options;
    Rng& rng;
    std::vector<Node>& nodes;
    std::vector<double> class_weight;

    std::vector<double> weighted_counts(std::span<const std::size_t> idx) const {
      std::vector<double> counts(d.n_classes(), 0.0);
      for (std::size_t r : idx) {
        const auto y = static_cast<std::size_t>(d.label(r));
        counts[y] += class_weight[y];
      }
      return counts;
    }

    double score(std::span<const double> parent, double parent_total,
                 std::span<const double> left, double left_total,
                 std::span<const double> right, double right_total) const {
      const Criterion base = options.criterion == Criterion::kGini ? Criterion::kGini
                                                                   : Criterion::kEntropy;
      const double gain = impurity(parent, parent_total, base) -
                          (left_total / parent_total) * impurity(left, left_total, base) -
                          (right_total / parent_total) * impurity(right, right_total, base);
      if (options.criterion != Criterion::kGainRatio) return gain;
      const double pl = left_total / parent_total;
      const double pr = right_total / parent_total;
      const double split_info = -(pl > 0 ? pl * std::log2(pl) : 0.0) -
                                (pr > 0 ? pr * std::log2(pr) : 0.0);
      return split_info > 1e-12 ? gain / split_info : 0.0;
    }

    std::vector<std::size_t> candidate_features() {
      std::vector<std::size_t> f(d.n_features());
      std::iota(f.begin(), f.end(), 0);
      const auto wanted = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::lround(options.max_features * static_cast<double>(f.size()))),
          1, f.size());
      if (wanted < f.size()) {
        // Partial Fisher-Yates, then restore ascending order for determinism.
        for (std::size_t i = 0; i < wanted; ++i) {
          const std::size_t j = i + rng.below(f.size() - i);
          std::swap(f[i], f[j]);
        }
        f.resize(wanted);
        std::sort(f.begin(), f.end());
      }
      return f;
    }

    Split best_split(std::span<const std::size_t> idx) {
      Split best;
      const std::size_t k = d.n_classes();
      const std::size_t min_leaf = options.min_samples_leaf;
      for (std::size_t f : candidate_features()) {
        const FeatureSpec& spec = d.features()[f];
        std::vector<std::size_t> present;
        present.reserve(idx.size());
        for (std::size_t r : idx) {
          if (!is_missing(d.row(r)[f])) present.push_back(r);
        }
        if (present.size() < 2 * min_leaf) continue;
        const std::vector<double> parent = weighted_counts(present);
        const double parent_total = std::accumulate(parent.begin(), parent.end(), 0.0);

        if (spec.categorical()) {
          std::vector<std::vector<double>> by_cat(spec.arity(), std::vector<double>(k, 0.0));
          std::vector<std::size_t> sizes(spec.arity(), 0);
          for (std::size_t r : present) {
            const auto v = static_cast<std::size_t>(d.row(r)[f]);
            const auto y = static_cast<std::size_t>(d.label(r));
            by_cat[v][y] += class_weight[y];
            ++sizes[v];
          }
          for (std::size_t v = 0; v < spec.arity(); ++v) {
            if (sizes[v] < min_leaf || present.size() - sizes[v] < min_leaf) continue;
            std::vector<double> right(k);
            for (std::size_t c = 0; c < k; ++c) right[c] = parent[c] - by_cat[v][c];
            const double lt = std::accumulate(by_cat[v].begin(), by_cat[v].end(), 0.0);
            const double s = score(parent, parent_total, by_cat[v], lt, right, parent_total - lt);
            if (s > best.gain + 1e-12) best = {s, static_cast<int>(f), true, static_cast<double>(v)};
          }
          continue;
        }

        std::sort(present.begin(), present.end(), [&](std::size_t a, std::size_t b) {
          const double va = d.row(a)[f];
          const double vb = d.row(b)[f];
          return va < vb || (va == vb && a < b);
        });
        std::vector<double> left(k, 0.0);
        double lt = 0.0;
        for (std::size_t i = 0; i + 1 < present.size(); ++i) {
          const auto y = static_cast<std::size_t>(d.label(present[i]));
          left[y] += class_weight[y];
          lt += class_weight[y];
          const double v = d.row(present[i])[f];
          const double next = d.row(present[i + 1])[f];
          if (v == next) continue;
          const std::size_t n_left = i + 1;
          if (n_left < min_leaf || present.size() - n_left < min_leaf) continue;
          std::vector<double> right(k);
          for (std::size_t c = 0; c < k; ++c) right[c] = parent[c] - left[c];
          const double s = score(parent, parent_total, left, lt, right, parent_total - lt);
          if (s > best.gain + 1e-12) best = {s, static_cast<int>(f), false, 0.5 * (v + next)};
        }
      }
      return best;
    }

    std::size_t grow(std::vector<std::size_t>& idx, int depth) {
      const std::size_t at = nodes.size();
      nodes.emplace_back();
      const std::vector<double> counts = weighted_counts(idx);
      nodes[at].label = argmax_lowest(counts);
      const bool pure = std::count_if(counts.begin(), counts.end(),
                                      [](double c) { return c > 0; }) <= 1;
      if (pure || depth >= options.max_depth || idx.size() < 2 * options.min_samples_leaf) {
        return at;
      }
      const Split split = best_split(idx);
      if (split.feature < 0) return at;

      std::vector<std::size_t> left, right, missing;
      for (std::size_t r : idx) {
        const double v = d.row(r)[static_cast<std::size_t>(split.feature)];
        if (is_missing(v)) {
          missing.push_back(r);
        } else if (split.categorical ? v == split.threshold : v < split.threshold) {
          left.push_back(r);
        } else {
          right.push_back(r);
        }
      }
      const bool missing_left = left.size() >= right.size();
      auto& target = missing_left ? left : right;
      target.insert(target.end(), missing.begin(), missing.end());
      idx.clear();
      idx.shrink_to_fit();

      nodes[at].feature = split.feature;
      nodes[at].categorical = split.categorical;
      nodes[at].threshold = split.threshold;
      nodes[at].missing_left = missing_left;
      const std::size_t l = grow(left, depth + 1);
      const std::size_t r = grow(right, depth + 1);
      nodes[at].left = l;
      nodes[at].right = r;
      return at;
    }
  };

  std::vector<Node> nodes_;
};

class TreeClassifier final : public Classifier {
 public:
  explicit TreeClassifier(Tree tree) : tree_(std::move(tree)) {}
  int predict(std::span<const double> x) const override { return tree_.predict(x); }

 private:
  Tree tree_;
};

class ForestClassifier final : public Classifier {
 public:
  ForestClassifier(std::vector<Tree> trees, std::size_t n_classes)
      : trees_(std::move(trees)), n_classes_(n_classes) {}

  int predict(std::span<const double> x) const override {
    std::vector<double> votes(n_classes_, 0.0);
    for (const Tree& t : trees_) votes[static_cast<std::size_t>(t.predict(x))] += 1.0;
    return argmax_lowest(votes);
  }

 private:
  std::vector<Tree> trees_;
  std::size_t n_classes_;
};

}  // namespace

ClassifierPtr train_decision_tree(const Configuration& c, const Dataset& d, Rng& rng) {
  TreeOptions options;
  options.criterion = parse_criterion(choice(c, "criterion"));
  options.balanced = choice(c, "class_weight") == "balanced";
  options.max_depth = static_cast<int>(param(c, "max_depth"));
  options.min_samples_leaf = static_cast<std::size_t>(param(c, "min_samples_leaf"));
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), 0);
  return std::make_shared<TreeClassifier>(Tree::build(d, rows, options, rng));
}

ClassifierPtr train_random_forest(const Configuration& c, const Dataset& d, Rng& rng) {
  TreeOptions options;
  options.criterion = parse_criterion(choice(c, "criterion"));
  options.max_depth = static_cast<int>(param(c, "max_depth"));
  options.max_features = param(c, "max_features");
  const bool bootstrap = choice(c, "bootstrap") == "true";
  const auto n_trees = static_cast<std::size_t>(param(c, "n_trees"));

  std::vector<Tree> trees;
  trees.reserve(n_trees);
  std::vector<std::size_t> rows(d.size());
  for (std::size_t t = 0; t < n_trees; ++t) {
    if (bootstrap) {
      for (auto& r : rows) r = rng.below(d.size());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    trees.push_back(Tree::build(d, rows, options, rng));
  }
  return std::make_shared<ForestClassifier>(std::move(trees), d.n_classes());
}

}  // namespace massah::detail
