#include "precipuq/linear.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "precipuq/numeric.hpp"
#include "precipuq/optim.hpp"
#include "precipuq/scoring.hpp"

namespace precipuq {

namespace {

void check_finite(const Matrix& x, std::span<const double> y) {
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_linear_qr: non-finite feature");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_linear_qr: non-finite target");
  }
}

}  // namespace

LinearQuantileModel fit_linear_qr(const Matrix& x, std::span<const double> y, double alpha,
                                  const SolverConfig& cfg) {
  if (y.empty() || x.rows() != y.size()) {
    throw std::invalid_argument("fit_linear_qr: need one target per row");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("fit_linear_qr: alpha must lie in (0, 1)");
  }
  check_finite(x, y);

  const std::size_t n = y.size();
  const std::size_t p = x.cols();
  const Standardization std_x = standardize_columns(x);

  Matrix xs(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      xs(i, j) = std_x.excluded[j] ? 0.0 : (x(i, j) - std_x.mean[j]) / std_x.scale[j];
    }
  }

  const double y_scale = std::max(mean_scale(y).scale, 1e-12);

  // theta = [coefficients..., intercept]; warm start at the target quantile.
  std::vector<double> theta(p + 1, 0.0);
  theta[p] = empirical_quantile(y, alpha);

  std::vector<double> residual(n);
  auto objective = [&](std::span<const double> th, double eps, std::span<double> grad) {
    for (std::size_t i = 0; i < n; ++i) {
      double pred = th[p];
      const auto row = xs.row(i);
      for (std::size_t j = 0; j < p; ++j) pred += th[j] * row[j];
      residual[i] = pred - y[i];
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> losses(n);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      losses[i] = smoothed_pinball(residual[i], alpha, eps);
      const double d = smoothed_pinball_derivative(residual[i], alpha, eps) * inv_n;
      const auto row = xs.row(i);
      for (std::size_t j = 0; j < p; ++j) grad[j] += d * row[j];
      grad[p] += d;
    }
    for (std::size_t j = 0; j < p; ++j) {
      if (std_x.excluded[j]) grad[j] = 0.0;
    }
    return pairwise_mean(losses);
  };

  DescentOptions opts;
  opts.eps_start = y_scale;
  opts.eps_floor = cfg.eps_floor_rel * y_scale;
  opts.max_iter_per_stage = cfg.max_iter_per_stage;
  opts.stage_tolerance = cfg.tolerance;
  opts.initial_step = y_scale;
  smoothed_descent(theta, objective, opts);

  LinearQuantileModel model;
  model.alpha = alpha;
  model.intercept = theta[p];
  model.coefficients.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(p));
  model.feature_mean = std_x.mean;
  model.feature_scale = std_x.scale;
  for (std::size_t j = 0; j < p; ++j) {
    if (std_x.excluded[j]) model.coefficients[j] = 0.0;
  }
  return model;
}

double predict_linear(const LinearQuantileModel& model, std::span<const double> features) {
  if (features.size() != model.coefficients.size()) {
    throw std::invalid_argument("predict_linear: feature length mismatch");
  }
  double pred = model.intercept;
  for (std::size_t j = 0; j < features.size(); ++j) {
    pred += model.coefficients[j] * (features[j] - model.feature_mean[j]) / model.feature_scale[j];
  }
  return pred;
}

double linear_training_loss(const LinearQuantileModel& model, const Matrix& x,
                            std::span<const double> y) {
  std::vector<double> preds(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) preds[i] = predict_linear(model, x.row(i));
  return mean_quantile_score(preds, y, model.alpha);
}

std::string LinearQuantileModel::to_json_string() const {
  nlohmann::ordered_json j;
  j["kind"] = "linear_quantile_model";
  j["alpha"] = alpha;
  j["intercept"] = intercept;
  j["coefficients"] = coefficients;
  j["feature_mean"] = feature_mean;
  j["feature_scale"] = feature_scale;
  return j.dump(2);
}

LinearQuantileModel LinearQuantileModel::from_json_string(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  LinearQuantileModel m;
  m.alpha = j.at("alpha").get<double>();
  m.intercept = j.at("intercept").get<double>();
  m.coefficients = j.at("coefficients").get<std::vector<double>>();
  m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  return m;
}

}  // namespace precipuq
