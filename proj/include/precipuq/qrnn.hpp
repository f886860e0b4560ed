#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "precipuq/numeric.hpp"

namespace precipuq {

struct QrnnConfig {
  int hidden_width = 8;
  int n_trials = 1;
  int max_iter_per_stage = 150;
  double eps_floor_rel = 1e-6;   // final smoothing relative to scale(y)
  double stage_tolerance = 1e-10;
  std::uint64_t seed = 0;
};

// Single-hidden-layer quantile network: tanh units over standardized inputs,
// trained on the smoothed pinball loss in standardized target space.
struct QrnnModel {
  double alpha = 0.5;
  int hidden_width = 8;
  Matrix w_in;                 // hidden_width x n_features
  std::vector<double> b_in;    // hidden_width
  std::vector<double> w_out;   // hidden_width
  double b_out = 0.0;
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;
  double target_mean = 0.0;
  double target_scale = 1.0;

  std::string to_json_string() const;
  static QrnnModel from_json_string(const std::string& text);
};

// Flat parameter layout used by the optimizer and the gradient checks:
// [w_in row-major, b_in, w_out, b_out].
std::size_t qrnn_param_count(int hidden_width, std::size_t n_features);

// Mean smoothed pinball loss of the network on standardized data, filling the
// analytic gradient. Exposed so finite-difference checks can drive it.
double qrnn_loss_grad(std::span<const double> theta, int hidden_width, const Matrix& x_std,
                      std::span<const double> y_std, double alpha, double eps,
                      std::span<double> grad);

QrnnModel fit_qrnn(const Matrix& x, std::span<const double> y, double alpha,
                   const QrnnConfig& cfg = {});

double predict_qrnn(const QrnnModel& model, std::span<const double> features);

}  // namespace precipuq
