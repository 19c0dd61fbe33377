// Apache License, Version 2.0, refer to LICENSE.txt

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "massah/experiment.hpp"

namespace massah {

namespace {

constexpr std::size_t kExactLimit = 25;
constexpr std::size_t kCdfLimit = 60;
constexpr double kLevels[] = {0.05, 0.01};

// counts[s] = number of subsets of {1..n} whose sum is s.
std::vector<std::uint64_t> subset_sum_counts(std::size_t n) {
  std::vector<std::uint64_t> counts(n * (n + 1) / 2 + 1, 0);
  counts[0] = 1;
  std::size_t top = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    top += k;
    for (std::size_t s = top; s >= k; --s) counts[s] += counts[s - k];
  }
  return counts;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_quantile(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (normal_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double wilcoxon_null_cdf(std::size_t n, int c) {
  if (n > kCdfLimit) throw std::invalid_argument("exact null distribution limited to n <= 60");
  if (c < 0) return 0.0;
  const auto counts = subset_sum_counts(n);
  const std::size_t upto = std::min<std::size_t>(static_cast<std::size_t>(c), counts.size() - 1);
  long double below = 0;
  for (std::size_t s = 0; s <= upto; ++s) below += static_cast<long double>(counts[s]);
  return static_cast<double>(below / std::ldexp(1.0L, static_cast<int>(n)));
}

std::optional<int> wilcoxon_critical_value(std::size_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (n == 0) return std::nullopt;
  int c = -1;
  if (n <= kExactLimit) {
    const auto counts = subset_sum_counts(n);
    const long double total = std::ldexp(1.0L, static_cast<int>(n));
    long double below = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      below += static_cast<long double>(counts[s]);
      if (below / total > alpha) break;
      c = static_cast<int>(s);
    }
  } else {
    const auto nd = static_cast<double>(n);
    const double mean = nd * (nd + 1.0) / 4.0;
    const double sd = std::sqrt(nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0);
    c = static_cast<int>(std::floor(mean + sd * normal_quantile(alpha) - 0.5));
  }
  if (c < 0) return std::nullopt;
  return c;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("paired samples differ in length");
  if (x.size() < 5) throw std::invalid_argument("Wilcoxon test needs at least 5 pairs");
  std::vector<double> d;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw std::invalid_argument("non-finite value in paired samples");
    }
    if (x[i] != y[i]) d.push_back(x[i] - y[i]);
  }
  WilcoxonResult r;
  r.n_effective = d.size();
  if (d.empty()) {
    r.all_zero = true;
    return r;
  }
  std::vector<std::size_t> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(d[a]) < std::abs(d[b]); });
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) (d[order[k]] > 0 ? r.r_plus : r.r_minus) += rank;
    i = j + 1;
  }
  r.t = std::min(r.r_plus, r.r_minus);
  for (double level : kLevels) {
    const auto crit = wilcoxon_critical_value(r.n_effective, level);
    if (crit && r.t <= *crit) r.significant_at.push_back(level);
  }
  return r;
}

}  // namespace massah
