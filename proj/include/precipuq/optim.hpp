#pragma once

#include <functional>
#include <span>
#include <vector>

namespace precipuq {

// Huber-smoothed pinball pieces. With x = prediction - observation and the
// side weight w(x) = (1 - alpha) for x >= 0, alpha otherwise:
//   f_eps(x) = w(x) * h_eps(x),  h_eps(x) = x^2 / (2 eps) for |x| <= eps,
//                                           |x| - eps/2  otherwise.
// Convex and continuously differentiable in x; converges to the exact
// pinball as eps -> 0 (gap at most eps/2 per term).
double smoothed_pinball(double x, double alpha, double eps);
double smoothed_pinball_derivative(double x, double alpha, double eps);

struct DescentOptions {
  double eps_start = 1.0;
  double eps_floor = 1e-6;
  int max_iter_per_stage = 200;
  double stage_tolerance = 1e-10;  // relative loss plateau per stage
  double initial_step = 1.0;
  int max_backtracks = 40;
};

// Full-batch gradient descent with Armijo backtracking over an annealed
// smoothing schedule: run to plateau, halve eps, repeat until eps_floor.
// The objective callback evaluates loss and fills the gradient for a given
// (theta, eps). Accepted steps never increase the stage loss. Returns the
// final-stage loss.
using SmoothedObjective =
    std::function<double(std::span<const double> theta, double eps, std::span<double> grad)>;

double smoothed_descent(std::vector<double>& theta, const SmoothedObjective& objective,
                        const DescentOptions& options);

}  // namespace precipuq
