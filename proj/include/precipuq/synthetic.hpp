#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "precipuq/dataset.hpp"

namespace precipuq {

// Seeded synthetic regression law with analytic conditional quantiles:
// 17 predictors x_j ~ U(0,1), target y = m(x) + s(x) * eps, eps standard
// normal, so q(x, alpha) = m(x) + s(x) * z_alpha.
//
// Scenarios:
//   hetero        - m = 10 + 5 x1 + 3 sin(2 pi x2), s = 1 + 2 x3
//   single_signal - m = 10 x1, s = 0.5 (all signal in the first predictor)
struct SyntheticScenario {
  std::string name;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  static SyntheticScenario by_name(const std::string& name, std::size_t n, std::uint64_t seed);
  static bool known(const std::string& name);

  double location(std::span<const double> x) const;
  double spread(std::span<const double> x) const;
  // The analytic quantile oracle; exact m(x) at alpha = 0.5.
  double quantile(std::span<const double> x, double alpha) const;
};

struct SyntheticData {
  Dataset dataset;
  SyntheticScenario scenario;  // carries the oracle
};

// Seeded draws; station ids are assigned in blocks of 200 consecutive samples
// so per-station statistics have substance.
SyntheticData generate_synthetic(const SyntheticScenario& scenario);

}  // namespace precipuq
