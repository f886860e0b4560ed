#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "precipuq/levels.hpp"
#include "precipuq/numeric.hpp"

namespace precipuq {

struct ForestConfig {
  int n_trees = 500;
  int mtry = 6;          // ceil(17 / 3)
  int min_leaf = 5;      // bag entries per leaf
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int jobs = 1;          // tree growth parallelism; never affects results
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 marks a leaf
  double threshold = 0.0;     // values <= threshold go left
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int64_t members_begin = 0;  // leaf: [begin, end) into members
  std::int64_t members_end = 0;

  bool is_leaf() const { return feature < 0; }
};

// One CART regression tree grown on a bag. Leaves retain the bag's training
// row indices (with bootstrap multiplicity) so any conditional quantile can
// be read off later.
struct RegressionTree {
  std::vector<TreeNode> nodes;
  std::vector<std::uint32_t> members;
  std::uint64_t seed = 0;

  std::size_t leaf_index(std::span<const double> features) const;
};

class QuantileForest {
 public:
  QuantileForest() = default;
  QuantileForest(ForestConfig config, std::vector<RegressionTree> trees,
                 std::vector<double> train_targets)
      : config_(config), trees_(std::move(trees)), train_targets_(std::move(train_targets)) {}

  const ForestConfig& config() const { return config_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  const std::vector<double>& train_targets() const { return train_targets_; }

  void save(const std::filesystem::path& path) const;
  static QuantileForest load(const std::filesystem::path& path);

 private:
  ForestConfig config_;
  std::vector<RegressionTree> trees_;
  std::vector<double> train_targets_;
};

// Grows cfg.n_trees trees on bootstrap resamples with variance-reduction
// splits over cfg.mtry random features per node, stopping at min_leaf.
// Deterministic for a given (seed, data); per-tree seeds are derived from the
// forest seed, so parallel growth is order-independent.
QuantileForest fit_qrf(const Matrix& x, std::span<const double> y, const ForestConfig& cfg);

// Training-row weights for a query point: mean over trees of
// multiplicity(i in leaf) / |leaf|. Nonnegative, summing to 1.
std::vector<double> qrf_weights(const QuantileForest& forest, std::span<const double> features);

// Serves repeated predictions from one forest: presorts the training targets
// once and reuses the weight buffer across queries.
class QrfPredictor {
 public:
  explicit QrfPredictor(const QuantileForest& forest);

  // Weighted empirical quantiles (left-continuous generalized inverse) at
  // every level; one forest serves all levels.
  std::vector<double> predict(std::span<const double> features, const LevelGrid& grid);

 private:
  const QuantileForest* forest_;
  std::vector<std::uint32_t> order_;  // train rows ascending by target
  std::vector<double> weights_;       // scratch
};

// Single-query convenience over QrfPredictor.
std::vector<double> predict_qrf(const QuantileForest& forest, std::span<const double> features,
                                const LevelGrid& grid);

}  // namespace precipuq
