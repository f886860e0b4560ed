#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "precipuq/numeric.hpp"

namespace precipuq {

enum class GrowthMode { levelwise, leafwise };

// Hyperparameters for both boosted-tree flavors. Levelwise grows depth-bounded
// trees on raw feature values; leafwise grows best-gain-first trees on binned
// features.
struct BoostConfig {
  GrowthMode mode = GrowthMode::leafwise;
  double alpha = 0.5;
  int n_iterations = 400;
  double learning_rate = 0.05;
  int max_depth = 10;
  int max_leaves = 500;
  int min_data_in_leaf = 200;
  double feature_fraction = 0.75;
  double bagging_fraction = 0.75;
  double min_split_gain = 0.0;
  int max_bins = 255;
  std::uint64_t seed = 0;

  static BoostConfig levelwise_defaults(double alpha = 0.5);
  static BoostConfig leafwise_defaults(double alpha = 0.5);

  void validate() const;
};

// Quantile-binned feature discretization for the leafwise mode. Values map to
// bin b = count of edges < value; bin b spans (edges[b-1], edges[b]].
struct FeatureBinning {
  std::vector<std::vector<double>> edges;  // per feature, strictly increasing

  static FeatureBinning build(const Matrix& x, int max_bins);

  int bin(std::size_t feature, double value) const;
  std::size_t n_bins(std::size_t feature) const { return edges[feature].size() + 1; }
};

struct BoostNode {
  std::int32_t feature = -1;   // -1 marks a leaf
  double threshold = 0.0;      // levelwise: raw value, x <= threshold goes left
  std::int32_t split_bin = -1; // leafwise: bin index, bin(x) <= split_bin goes left
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;          // leaf output before learning-rate scaling
  double gain = 0.0;

  bool is_leaf() const { return feature < 0; }
};

struct BoostTree {
  std::vector<BoostNode> nodes;
};

struct BoostEnsemble {
  double base_prediction = 0.0;
  std::vector<BoostTree> trees;
  std::vector<double> total_gain;     // per feature, sum of stored split gains
  std::vector<double> training_curve; // mean exact pinball after each iteration
  BoostConfig config;
  FeatureBinning binning;             // populated in leafwise mode

  void save(const std::filesystem::path& path) const;
  static BoostEnsemble load(const std::filesystem::path& path);
};

// Gradient boosting on the pinball pseudo-gradient g_i = alpha - 1{y_i < F_i},
// with split gain G_L^2/n_L + G_R^2/n_R - G^2/n and every leaf output renewed
// to the empirical alpha-quantile of in-leaf residuals. Deterministic given
// the seed; per-iteration row/feature subsampling uses derived seeds.
BoostEnsemble fit_boost(const Matrix& x, std::span<const double> y, const BoostConfig& cfg);

double predict_boost(const BoostEnsemble& ensemble, std::span<const double> features);

}  // namespace precipuq
