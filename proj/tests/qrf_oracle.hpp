#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "precipuq/forest.hpp"

namespace testutil {

// Exhaustive weighted-ECDF oracle for quantile forests. Independent of the
// prediction path: routes queries with its own loop over the public tree
// structure, materializes the full training-row weight vector, and evaluates
// the left-continuous generalized inverse by explicit cumulative sums.
inline double qrf_oracle_quantile(const precipuq::QuantileForest& forest,
                                  std::span<const double> x, double alpha) {
  const auto& y = forest.train_targets();
  std::vector<double> w(y.size(), 0.0);
  for (const auto& tree : forest.trees()) {
    std::size_t node = 0;
    while (tree.nodes[node].feature >= 0) {
      const auto& nd = tree.nodes[node];
      node = x[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                 ? static_cast<std::size_t>(nd.left)
                 : static_cast<std::size_t>(nd.right);
    }
    const auto& leaf = tree.nodes[node];
    const auto size = static_cast<double>(leaf.members_end - leaf.members_begin);
    for (auto k = leaf.members_begin; k < leaf.members_end; ++k) {
      w[tree.members[static_cast<std::size_t>(k)]] +=
          1.0 / (size * static_cast<double>(forest.trees().size()));
    }
  }

  std::vector<std::size_t> order(y.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });
  double total = 0.0;
  for (double v : w) total += v;
  const double threshold = alpha * total - 1e-12 * total;
  double cum = 0.0;
  for (std::size_t k : order) {
    cum += w[k];
    if (cum >= threshold) return y[k];
  }
  return y[order.back()];
}

}  // namespace testutil
