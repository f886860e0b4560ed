#pragma once

#include <cstddef>

#include "precipuq/levels.hpp"

namespace precipuq {

struct CalibrationLog {
  std::size_t n_censored = 0;
  std::size_t n_crossings_fixed = 0;
};

// Replaces negative predictions at the lowest level with zero. Other levels
// are untouched.
QuantilePredictions censor_lowest(QuantilePredictions preds, CalibrationLog* log = nullptr);

// Single ascending pass per sample: any prediction smaller than the one at
// the immediately lower level is set equal to it. Output is nondecreasing
// across levels and the calibrated flag is set. Idempotent.
QuantilePredictions fix_crossing(QuantilePredictions preds, CalibrationLog* log = nullptr);

// censor_lowest then fix_crossing, the calibration order used everywhere.
QuantilePredictions calibrate(QuantilePredictions preds, CalibrationLog* log = nullptr);

}  // namespace precipuq
