#pragma once

#include <cstddef>
#include <vector>

#include "precipuq/numeric.hpp"

namespace precipuq {

// Ordered quantile levels at which predictions are issued.
class LevelGrid {
 public:
  // The nine default levels: 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975.
  LevelGrid();
  // Throws std::invalid_argument unless strictly increasing within (0, 1).
  explicit LevelGrid(std::vector<double> levels);

  static const std::vector<double>& default_levels();

  std::size_t size() const { return levels_.size(); }
  double operator[](std::size_t i) const { return levels_[i]; }
  const std::vector<double>& levels() const { return levels_; }

  bool operator==(const LevelGrid&) const = default;

 private:
  std::vector<double> levels_;
};

// Per-sample predictive quantiles over a level grid. Monotonicity across
// levels is only guaranteed once `calibrated` is set by the crossing repair.
struct QuantilePredictions {
  Matrix values;  // n_samples x n_levels
  LevelGrid grid;
  bool calibrated = false;

  std::size_t n_samples() const { return values.rows(); }
  std::size_t n_levels() const { return values.cols(); }

  // Throws std::invalid_argument on shape mismatch or non-finite entries.
  void validate() const;
};

}  // namespace precipuq
