// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "models.hpp"

namespace massah::detail {
namespace {

// Per-class weight rows over the encoded features plus a trailing bias.
class LinearClassifier final : public Classifier {
 public:
  LinearClassifier(FeatureEncoder encoder, std::vector<double> weights, std::size_t n_classes)
      : encoder_(std::move(encoder)), weights_(std::move(weights)), n_classes_(n_classes) {}

  int predict(std::span<const double> x) const override {
    const std::vector<double> z = encoder_.encode(x);
    const std::size_t stride = z.size() + 1;
    std::vector<double> scores(n_classes_, 0.0);
    for (std::size_t c = 0; c < n_classes_; ++c) {
      const double* w = weights_.data() + c * stride;
      double s = w[z.size()];
      for (std::size_t j = 0; j < z.size(); ++j) s += w[j] * z[j];
      scores[c] = s;
    }
    return argmax_lowest(scores);
  }

 private:
  FeatureEncoder encoder_;
  std::vector<double> weights_;
  std::size_t n_classes_;
};

}  // namespace

// Multinomial logistic regression, L2 penalty on weights (not bias), batch
// gradient descent with step 1/L where L bounds the gradient's Lipschitz constant.
ClassifierPtr train_logistic(const Configuration& c, const Dataset& d, TrainingFlags& flags) {
  const double lambda = param(c, "l2");
  FeatureEncoder encoder(d, /*impute=*/true);
  const std::vector<double> x = encoder.encode_all(d);
  const std::size_t n = d.size();
  const std::size_t w = encoder.width();
  const std::size_t stride = w + 1;
  const std::size_t k = d.n_classes();

  double mean_sq = 0.0;
  for (double v : x) mean_sq += v * v;
  mean_sq = mean_sq / static_cast<double>(n) + 1.0;
  const double step = 1.0 / (0.5 * mean_sq + lambda);

  std::vector<double> weights(k * stride, 0.0);
  std::vector<double> grad(weights.size());
  std::vector<double> best = weights;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> prob(k);
  bool converged = false;

  for (int epoch = 0; epoch < kMaxEpochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* xi = x.data() + i * w;
      double top = -std::numeric_limits<double>::infinity();
      for (std::size_t cls = 0; cls < k; ++cls) {
        const double* wc = weights.data() + cls * stride;
        double s = wc[w];
        for (std::size_t j = 0; j < w; ++j) s += wc[j] * xi[j];
        prob[cls] = s;
        top = std::max(top, s);
      }
      double z = 0.0;
      for (double& p : prob) z += (p = std::exp(p - top));
      const auto y = static_cast<std::size_t>(d.label(i));
      loss -= std::log(std::max(prob[y] / z, 1e-300));
      for (std::size_t cls = 0; cls < k; ++cls) {
        const double g = prob[cls] / z - (cls == y ? 1.0 : 0.0);
        double* gc = grad.data() + cls * stride;
        for (std::size_t j = 0; j < w; ++j) gc[j] += g * xi[j];
        gc[w] += g;
      }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double norm_sq = 0.0;
    for (std::size_t cls = 0; cls < k; ++cls) {
      for (std::size_t j = 0; j <= w; ++j) {
        const std::size_t idx = cls * stride + j;
        grad[idx] *= inv_n;
        if (j < w) {
          grad[idx] += lambda * weights[idx];
          loss += 0.5 * lambda * weights[idx] * weights[idx];
        }
        norm_sq += grad[idx] * grad[idx];
      }
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = weights;
    }
    if (norm_sq < 1e-10) {
      converged = true;
      break;
    }
    for (std::size_t idx = 0; idx < weights.size(); ++idx) weights[idx] -= step * grad[idx];
  }
  flags.not_converged = !converged;
  return std::make_shared<LinearClassifier>(std::move(encoder), std::move(best), k);
}

// Multiclass perceptron: on a margin violation the true class row moves
// toward x and the offending row away from it.
ClassifierPtr train_perceptron(const Configuration& c, const Dataset& d, Rng& rng,
                               TrainingFlags& flags) {
  const bool averaged = choice(c, "averaged") == "true";
  const bool shuffle = choice(c, "shuffle") == "true";
  const bool inverse_schedule = choice(c, "schedule") == "inverse";
  const double margin = choice(c, "margin") == "unit" ? 1.0 : 0.0;
  const bool use_bias = choice(c, "bias") == "true";
  const int epochs = static_cast<int>(param(c, "epochs"));
  const double rate0 = param(c, "learning_rate");

  FeatureEncoder encoder(d, /*impute=*/true);
  const std::vector<double> x = encoder.encode_all(d);
  const std::size_t n = d.size();
  const std::size_t w = encoder.width();
  const std::size_t stride = w + 1;
  const std::size_t k = d.n_classes();

  std::vector<double> weights(k * stride, 0.0);
  std::vector<double> sum(k * stride, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> scores(k);
  double steps = 0.0;
  bool separated = false;

  for (int epoch = 0; epoch < std::min(epochs, kMaxEpochs); ++epoch) {
    if (shuffle) rng.shuffle(order.begin(), order.end());
    const double rate = inverse_schedule ? rate0 / (1.0 + epoch) : rate0;
    std::size_t mistakes = 0;
    for (std::size_t i : order) {
      const double* xi = x.data() + i * w;
      const auto y = static_cast<std::size_t>(d.label(i));
      for (std::size_t cls = 0; cls < k; ++cls) {
        const double* wc = weights.data() + cls * stride;
        double s = use_bias ? wc[w] : 0.0;
        for (std::size_t j = 0; j < w; ++j) s += wc[j] * xi[j];
        scores[cls] = s;
      }
      // Strongest competitor to the true class.
      std::size_t rival = y == 0 ? 1 : 0;
      for (std::size_t cls = 0; cls < k; ++cls) {
        if (cls != y && scores[cls] > scores[rival]) rival = cls;
      }
      if (scores[y] - scores[rival] <= margin) {
        ++mistakes;
        double* wy = weights.data() + y * stride;
        double* wr = weights.data() + rival * stride;
        for (std::size_t j = 0; j < w; ++j) {
          wy[j] += rate * xi[j];
          wr[j] -= rate * xi[j];
        }
        if (use_bias) {
          wy[w] += rate;
          wr[w] -= rate;
        }
      }
      if (averaged) {
        for (std::size_t idx = 0; idx < sum.size(); ++idx) sum[idx] += weights[idx];
        steps += 1.0;
      }
    }
    if (mistakes == 0) {
      separated = true;
      break;
    }
  }
  flags.not_converged = !separated;
  if (averaged && steps > 0) {
    for (std::size_t idx = 0; idx < sum.size(); ++idx) weights[idx] = sum[idx] / steps;
  }
  return std::make_shared<LinearClassifier>(std::move(encoder), std::move(weights), k);
}

}  // namespace massah::detail
