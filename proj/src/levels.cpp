#include "precipuq/levels.hpp"

#include <cmath>
#include <stdexcept>

namespace precipuq {

const std::vector<double>& LevelGrid::default_levels() {
  static const std::vector<double> levels = {0.025, 0.050, 0.100, 0.250, 0.500,
                                             0.750, 0.900, 0.950, 0.975};
  return levels;
}

LevelGrid::LevelGrid() : levels_(default_levels()) {}

LevelGrid::LevelGrid(std::vector<double> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("LevelGrid: empty");
  double prev = 0.0;
  for (double a : levels_) {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("LevelGrid: level outside (0, 1)");
    if (!(a > prev)) throw std::invalid_argument("LevelGrid: levels must be strictly increasing");
    prev = a;
  }
}

void QuantilePredictions::validate() const {
  if (values.cols() != grid.size()) {
    throw std::invalid_argument("QuantilePredictions: column count != level count");
  }
  for (double v : values.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("QuantilePredictions: non-finite entry");
  }
}

}  // namespace precipuq
