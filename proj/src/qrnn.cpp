#include "precipuq/qrnn.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "precipuq/optim.hpp"
#include "precipuq/rng.hpp"

namespace precipuq {

std::size_t qrnn_param_count(int hidden_width, std::size_t n_features) {
  const auto h = static_cast<std::size_t>(hidden_width);
  return h * n_features + 2 * h + 1;
}

double qrnn_loss_grad(std::span<const double> theta, int hidden_width, const Matrix& x_std,
                      std::span<const double> y_std, double alpha, double eps,
                      std::span<double> grad) {
  const std::size_t n = y_std.size();
  const std::size_t p = x_std.cols();
  const auto h = static_cast<std::size_t>(hidden_width);
  if (theta.size() != qrnn_param_count(hidden_width, p) || grad.size() != theta.size()) {
    throw std::invalid_argument("qrnn_loss_grad: parameter size mismatch");
  }

  const double* w_in = theta.data();          // h x p
  const double* b_in = w_in + h * p;          // h
  const double* w_out = b_in + h;             // h
  const double b_out = theta[theta.size() - 1];

  std::fill(grad.begin(), grad.end(), 0.0);
  double* g_w_in = grad.data();
  double* g_b_in = g_w_in + h * p;
  double* g_w_out = g_b_in + h;
  double& g_b_out = grad[grad.size() - 1];

  std::vector<double> hidden(h);
  std::vector<double> losses(n);
  const double inv_n = 1.0 / static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = x_std.row(i);
    double pred = b_out;
    for (std::size_t k = 0; k < h; ++k) {
      double a = b_in[k];
      const double* w_row = w_in + k * p;
      for (std::size_t j = 0; j < p; ++j) a += w_row[j] * row[j];
      hidden[k] = std::tanh(a);
      pred += w_out[k] * hidden[k];
    }
    const double r = pred - y_std[i];
    losses[i] = smoothed_pinball(r, alpha, eps);
    const double d = smoothed_pinball_derivative(r, alpha, eps) * inv_n;

    g_b_out += d;
    for (std::size_t k = 0; k < h; ++k) {
      g_w_out[k] += d * hidden[k];
      const double da = d * w_out[k] * (1.0 - hidden[k] * hidden[k]);
      g_b_in[k] += da;
      double* gw_row = g_w_in + k * p;
      for (std::size_t j = 0; j < p; ++j) gw_row[j] += da * row[j];
    }
  }
  return pairwise_mean(losses);
}

QrnnModel fit_qrnn(const Matrix& x, std::span<const double> y, double alpha,
                   const QrnnConfig& cfg) {
  if (y.empty() || x.rows() != y.size()) throw std::invalid_argument("fit_qrnn: empty data");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("fit_qrnn: alpha outside (0, 1)");
  if (cfg.hidden_width < 1) throw std::invalid_argument("fit_qrnn: hidden_width must be >= 1");
  if (cfg.n_trials < 1) throw std::invalid_argument("fit_qrnn: n_trials must be >= 1");
  for (double v : x.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_qrnn: non-finite feature");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_qrnn: non-finite target");
  }

  const std::size_t n = y.size();
  const std::size_t p = x.cols();
  const auto h = static_cast<std::size_t>(cfg.hidden_width);

  const Standardization std_x = standardize_columns(x);
  const MeanScale std_y = mean_scale(y);

  Matrix xs(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      xs(i, j) = std_x.excluded[j] ? 0.0 : (x(i, j) - std_x.mean[j]) / std_x.scale[j];
    }
  }
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = (y[i] - std_y.mean) / std_y.scale;

  DescentOptions opts;
  opts.eps_start = 1.0;  // standardized target scale
  opts.eps_floor = cfg.eps_floor_rel;
  opts.max_iter_per_stage = cfg.max_iter_per_stage;
  opts.stage_tolerance = cfg.stage_tolerance;
  opts.initial_step = 0.5;

  std::vector<double> best_theta;
  double best_loss = std::numeric_limits<double>::infinity();

  for (int trial = 0; trial < cfg.n_trials; ++trial) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    std::vector<double> theta(qrnn_param_count(cfg.hidden_width, p), 0.0);
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(p) + 1.0);
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t k = 0; k < h * p; ++k) theta[k] = rng.uniform(-in_scale, in_scale);
    for (std::size_t k = h * p; k < h * p + h; ++k) theta[k] = rng.uniform(-0.1, 0.1);
    for (std::size_t k = h * p + h; k < h * p + 2 * h; ++k) {
      theta[k] = rng.uniform(-out_scale, out_scale);
    }
    theta.back() = 0.0;

    auto objective = [&](std::span<const double> th, double eps, std::span<double> grad) {
      return qrnn_loss_grad(th, cfg.hidden_width, xs, ys, alpha, eps, grad);
    };
    const double loss = smoothed_descent(theta, objective, opts);
    if (loss < best_loss) {
      best_loss = loss;
      best_theta = std::move(theta);
    }
  }

  QrnnModel model;
  model.alpha = alpha;
  model.hidden_width = cfg.hidden_width;
  model.w_in = Matrix(h, p);
  for (std::size_t k = 0; k < h; ++k) {
    for (std::size_t j = 0; j < p; ++j) model.w_in(k, j) = best_theta[k * p + j];
  }
  model.b_in.assign(best_theta.begin() + static_cast<std::ptrdiff_t>(h * p),
                    best_theta.begin() + static_cast<std::ptrdiff_t>(h * p + h));
  model.w_out.assign(best_theta.begin() + static_cast<std::ptrdiff_t>(h * p + h),
                     best_theta.begin() + static_cast<std::ptrdiff_t>(h * p + 2 * h));
  model.b_out = best_theta.back();
  model.feature_mean = std_x.mean;
  model.feature_scale = std_x.scale;
  model.target_mean = std_y.mean;
  model.target_scale = std_y.scale;
  return model;
}

double predict_qrnn(const QrnnModel& model, std::span<const double> features) {
  const std::size_t p = model.feature_mean.size();
  if (features.size() != p) throw std::invalid_argument("predict_qrnn: feature length mismatch");
  const auto h = static_cast<std::size_t>(model.hidden_width);

  double pred = model.b_out;
  for (std::size_t k = 0; k < h; ++k) {
    double a = model.b_in[k];
    for (std::size_t j = 0; j < p; ++j) {
      a += model.w_in(k, j) * (features[j] - model.feature_mean[j]) / model.feature_scale[j];
    }
    pred += model.w_out[k] * std::tanh(a);
  }
  return pred * model.target_scale + model.target_mean;
}

std::string QrnnModel::to_json_string() const {
  nlohmann::ordered_json j;
  j["kind"] = "qrnn_model";
  j["alpha"] = alpha;
  j["hidden_width"] = hidden_width;
  std::vector<std::vector<double>> w1(static_cast<std::size_t>(hidden_width));
  for (std::size_t k = 0; k < w1.size(); ++k) {
    w1[k].assign(w_in.row(k).begin(), w_in.row(k).end());
  }
  j["w_in"] = w1;
  j["b_in"] = b_in;
  j["w_out"] = w_out;
  j["b_out"] = b_out;
  j["feature_mean"] = feature_mean;
  j["feature_scale"] = feature_scale;
  j["target_mean"] = target_mean;
  j["target_scale"] = target_scale;
  return j.dump(2);
}

QrnnModel QrnnModel::from_json_string(const std::string& text) {
  const auto j = nlohmann::ordered_json::parse(text);
  QrnnModel m;
  m.alpha = j.at("alpha").get<double>();
  m.hidden_width = j.at("hidden_width").get<int>();
  const auto w1 = j.at("w_in").get<std::vector<std::vector<double>>>();
  const std::size_t p = w1.empty() ? 0 : w1[0].size();
  m.w_in = Matrix(w1.size(), p);
  for (std::size_t k = 0; k < w1.size(); ++k) {
    for (std::size_t jf = 0; jf < p; ++jf) m.w_in(k, jf) = w1[k][jf];
  }
  m.b_in = j.at("b_in").get<std::vector<double>>();
  m.w_out = j.at("w_out").get<std::vector<double>>();
  m.b_out = j.at("b_out").get<double>();
  m.feature_mean = j.at("feature_mean").get<std::vector<double>>();
  m.feature_scale = j.at("feature_scale").get<std::vector<double>>();
  m.target_mean = j.at("target_mean").get<double>();
  m.target_scale = j.at("target_scale").get<double>();
  return m;
}

}  // namespace precipuq
