#include "precipuq/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace precipuq {

double smoothed_pinball(double x, double alpha, double eps) {
  const double w = x >= 0.0 ? 1.0 - alpha : alpha;
  const double ax = std::abs(x);
  if (ax <= eps) return w * (x * x) / (2.0 * eps);
  return w * (ax - 0.5 * eps);
}

double smoothed_pinball_derivative(double x, double alpha, double eps) {
  const double w = x >= 0.0 ? 1.0 - alpha : alpha;
  if (std::abs(x) <= eps) return w * x / eps;
  return x > 0.0 ? w : -w;
}

double smoothed_descent(std::vector<double>& theta, const SmoothedObjective& objective,
                        const DescentOptions& options) {
  if (!(options.eps_start > 0.0) || !(options.eps_floor > 0.0)) {
    throw std::invalid_argument("smoothed_descent: eps schedule must be positive");
  }
  const std::size_t dim = theta.size();
  std::vector<double> grad(dim), trial(dim), trial_grad(dim);

  double loss = 0.0;
  double step = options.initial_step;
  double eps = options.eps_start;
  while (true) {
    if (eps < options.eps_floor) eps = options.eps_floor;
    loss = objective(theta, eps, grad);

    for (int it = 0; it < options.max_iter_per_stage; ++it) {
      double grad_sq = 0.0;
      for (double g : grad) grad_sq += g * g;
      if (grad_sq == 0.0) break;

      // Armijo backtracking; a clean first-try accept lets the step grow
      // again, and the accepted trial's gradient is reused directly.
      bool accepted = false;
      double improvement = 0.0;
      for (int bt = 0; bt < options.max_backtracks; ++bt) {
        for (std::size_t k = 0; k < dim; ++k) trial[k] = theta[k] - step * grad[k];
        const double trial_loss = objective(trial, eps, trial_grad);
        if (trial_loss <= loss - 1e-4 * step * grad_sq) {
          theta.swap(trial);
          grad.swap(trial_grad);
          improvement = loss - trial_loss;
          loss = trial_loss;
          accepted = true;
          if (bt == 0) step = std::min(step * 1.5, 1e6);
          break;
        }
        step *= 0.5;
        if (step < 1e-18) break;
      }
      if (!accepted) break;
      if (improvement <= options.stage_tolerance * (std::abs(loss) + 1e-30)) break;
    }

    if (eps == options.eps_floor) break;
    eps *= 0.5;
  }
  return loss;
}

}  // namespace precipuq
