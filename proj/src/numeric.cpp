#include "precipuq/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace precipuq {

namespace {

constexpr std::size_t kPairwiseBlock = 32;

}  // namespace

double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n <= kPairwiseBlock) {
    long double acc = 0.0L;
    for (double v : values) acc += v;
    return static_cast<double>(acc);
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double empirical_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw std::invalid_argument("empirical_quantile: empty input");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("empirical_quantile: alpha must lie in (0, 1)");
  }
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const double pos = alpha * static_cast<double>(n);
  std::vector<double> sorted(values.begin(), values.end());

  // When alpha*n lands on an integer k, the whole interval
  // [y_(k), y_(k+1)] minimizes the pinball sum; take its midpoint so the
  // value separates the two sides (an endpoint leaves the pseudo-gradient
  // blind to one of them). Otherwise the unique minimizer is y_(ceil(pos)).
  const double rounded = std::round(pos);
  if (std::abs(pos - rounded) <= 1e-9 * static_cast<double>(n) && rounded >= 1.0 &&
      rounded <= static_cast<double>(n - 1)) {
    const auto k = static_cast<std::ptrdiff_t>(rounded);
    std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
    const double lower = sorted[k - 1];
    const double upper = *std::min_element(sorted.begin() + k, sorted.end());
    return (lower + upper) / 2.0;
  }

  auto idx = static_cast<std::ptrdiff_t>(std::ceil(pos - 1e-9)) - 1;
  idx = std::clamp<std::ptrdiff_t>(idx, 0, n - 1);
  std::nth_element(sorted.begin(), sorted.begin() + idx, sorted.end());
  return sorted[idx];
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double alpha) {
  if (values.empty() || values.size() != weights.size()) {
    throw std::invalid_argument("weighted_quantile: bad input sizes");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("weighted_quantile: alpha must lie in (0, 1)");
  }
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });

  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weighted_quantile: negative weight");
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weighted_quantile: zero total weight");

  const double threshold = alpha * total - 1e-12 * total;
  double cum = 0.0;
  for (std::size_t k : order) {
    cum += weights[k];
    if (cum >= threshold) return values[k];
  }
  return values[order.back()];
}

MeanScale mean_scale(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("mean_scale: empty input");
  MeanScale ms;
  ms.mean = pairwise_mean(values);
  long double ss = 0.0L;
  for (double v : values) {
    const long double d = v - ms.mean;
    ss += d * d;
  }
  ms.scale = std::sqrt(static_cast<double>(ss / static_cast<long double>(values.size())));
  if (!(ms.scale > 1e-12 * (1.0 + std::abs(ms.mean)))) ms.scale = 1.0;
  return ms;
}

Standardization standardize_columns(const Matrix& x) {
  Standardization s;
  const std::size_t p = x.cols();
  s.mean.resize(p);
  s.scale.resize(p);
  s.excluded.resize(p);
  std::vector<double> col(x.rows());
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    const double mean = pairwise_mean(col);
    long double ss = 0.0L;
    for (double v : col) {
      const long double d = v - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(static_cast<double>(ss / static_cast<long double>(col.size())));
    s.mean[j] = mean;
    if (sd > 1e-12 * (1.0 + std::abs(mean))) {
      s.scale[j] = sd;
      s.excluded[j] = false;
    } else {
      s.scale[j] = 1.0;
      s.excluded[j] = true;
    }
  }
  return s;
}

}  // namespace precipuq
