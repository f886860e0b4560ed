#include "precipuq/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "precipuq/rng.hpp"

namespace precipuq {

namespace {

constexpr std::size_t kStationBlock = 200;

std::string station_name(std::size_t block) {
  std::string num = std::to_string(block);
  return "st" + std::string(num.size() < 4 ? 4 - num.size() : 0, '0') + num;
}

}  // namespace

SyntheticScenario SyntheticScenario::by_name(const std::string& name, std::size_t n,
                                             std::uint64_t seed) {
  if (!known(name)) throw std::invalid_argument("unknown synthetic scenario: " + name);
  return SyntheticScenario{name, n, seed};
}

bool SyntheticScenario::known(const std::string& name) {
  return name == "hetero" || name == "single_signal";
}

double SyntheticScenario::location(std::span<const double> x) const {
  if (name == "hetero") {
    return 10.0 + 5.0 * x[0] + 3.0 * std::sin(2.0 * std::numbers::pi * x[1]);
  }
  return 10.0 * x[0];
}

double SyntheticScenario::spread(std::span<const double> x) const {
  if (name == "hetero") return 1.0 + 2.0 * x[2];
  return 0.5;
}

double SyntheticScenario::quantile(std::span<const double> x, double alpha) const {
  if (alpha == 0.5) return location(x);
  return location(x) + spread(x) * normal_quantile(alpha);
}

SyntheticData generate_synthetic(const SyntheticScenario& scenario) {
  if (scenario.n < 1) throw std::invalid_argument("generate_synthetic: n must be >= 1");
  if (!SyntheticScenario::known(scenario.name)) {
    throw std::invalid_argument("unknown synthetic scenario: " + scenario.name);
  }

  SyntheticData out;
  out.scenario = scenario;
  auto& ds = out.dataset;
  for (std::size_t j = 0; j < kNumPredictors; ++j) {
    const std::string num = std::to_string(j + 1);
    ds.predictor_names[j] = "x" + std::string(num.size() < 2 ? 1 : 0, '0') + num;
  }

  Rng rng(scenario.seed);
  ds.samples.resize(scenario.n);
  for (std::size_t i = 0; i < scenario.n; ++i) {
    Sample& s = ds.samples[i];
    for (std::size_t j = 0; j < kNumPredictors; ++j) s.predictors[j] = rng.uniform();
    const double eps = rng.normal();
    s.target_mm = scenario.location(s.predictors) + scenario.spread(s.predictors) * eps;
    s.station_id = station_name(i / kStationBlock);
    s.month = 1 + static_cast<int>(i % 12);
    s.year = 2001 + static_cast<int>((i / 12) % 15);
  }
  ds.rebuild_station_index();
  return out;
}

}  // namespace precipuq
