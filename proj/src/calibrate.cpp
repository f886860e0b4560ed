#include "precipuq/calibrate.hpp"

namespace precipuq {

QuantilePredictions censor_lowest(QuantilePredictions preds, CalibrationLog* log) {
  preds.validate();
  for (std::size_t i = 0; i < preds.n_samples(); ++i) {
    double& lowest = preds.values(i, 0);
    if (lowest < 0.0) {
      lowest = 0.0;
      if (log) ++log->n_censored;
    }
  }
  return preds;
}

QuantilePredictions fix_crossing(QuantilePredictions preds, CalibrationLog* log) {
  preds.validate();
  for (std::size_t i = 0; i < preds.n_samples(); ++i) {
    for (std::size_t l = 1; l < preds.n_levels(); ++l) {
      const double lower = preds.values(i, l - 1);
      if (preds.values(i, l) < lower) {
        preds.values(i, l) = lower;
        if (log) ++log->n_crossings_fixed;
      }
    }
  }
  preds.calibrated = true;
  return preds;
}

QuantilePredictions calibrate(QuantilePredictions preds, CalibrationLog* log) {
  return fix_crossing(censor_lowest(std::move(preds), log), log);
}

}  // namespace precipuq
