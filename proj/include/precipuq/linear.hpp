#pragma once

#include <span>
#include <string>
#include <vector>

#include "precipuq/numeric.hpp"

namespace precipuq {

struct SolverConfig {
  double tolerance = 1e-9;        // relative plateau per smoothing stage
  int max_iter_per_stage = 400;
  double eps_floor_rel = 1e-6;    // final smoothing, relative to scale(y)
};

// Affine quantile predictor fitted on standardized features. Coefficients
// live in standardized space; predictions destandardize back to mm.
struct LinearQuantileModel {
  double alpha = 0.5;
  double intercept = 0.0;             // mm
  std::vector<double> coefficients;   // one per predictor
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;  // > 0

  std::string to_json_string() const;
  static LinearQuantileModel from_json_string(const std::string& text);
};

// Minimizes the mean smoothed pinball loss over affine predictors, annealing
// the smoothing toward eps_floor_rel * scale(y). Deterministic; constant
// features keep zero coefficients.
LinearQuantileModel fit_linear_qr(const Matrix& x, std::span<const double> y, double alpha,
                                  const SolverConfig& cfg = {});

double predict_linear(const LinearQuantileModel& model, std::span<const double> features);

// Mean exact pinball loss of the model on a dataset; used by tests and the
// nested-model dominance check.
double linear_training_loss(const LinearQuantileModel& model, const Matrix& x,
                            std::span<const double> y);

}  // namespace precipuq
