#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "precipuq/calibrate.hpp"
#include "precipuq/dataset.hpp"
#include "precipuq/forest.hpp"
#include "precipuq/gbt.hpp"
#include "precipuq/linear.hpp"
#include "precipuq/qrnn.hpp"
#include "precipuq/scoring.hpp"
#include "precipuq/synthetic.hpp"

namespace precipuq {

enum class FoldGranularity { by_sample, by_station };

struct FoldPlan {
  int k = 5;
  std::vector<int> assignment;  // per-sample fold id
  std::uint64_t seed = 0;
  FoldGranularity granularity = FoldGranularity::by_sample;

  std::vector<std::size_t> fold_sizes() const;
  std::vector<std::size_t> rows_in_fold(int fold) const;
  std::vector<std::size_t> rows_outside_fold(int fold) const;
};

// Seeded uniform shuffle, then block partition (sizes differ by at most one).
// by_station assigns whole stations to the currently smallest fold in
// shuffled order.
FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed,
                     FoldGranularity granularity = FoldGranularity::by_sample,
                     const std::map<std::string, std::vector<std::size_t>>* station_index = nullptr);

// Learner kinds: linear_qr, qrf, boost_levelwise, boost_leafwise, qrnn, and
// the analytic oracle (synthetic datasets only).
struct LearnerConfig {
  std::string kind;
  SolverConfig linear{};
  ForestConfig forest{};
  BoostConfig boost{};
  QrnnConfig qrnn{};
  std::string oracle_scenario = "hetero";
  std::uint64_t oracle_seed = 0;

  static LearnerConfig by_kind(const std::string& kind);
};

struct BenchmarkConfig {
  LevelGrid levels{};
  std::vector<LearnerConfig> learners;
  std::string benchmark_learner = "linear_qr";
  int folds = 5;
  FoldGranularity granularity = FoldGranularity::by_sample;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct EvaluationReport {
  ScoreTable table;
  std::map<std::string, CalibrationLog> calibration;  // per learner
  std::map<std::string, std::string> failed_learners;
  std::vector<std::pair<std::string, double>> timings;  // task label -> seconds
  std::vector<std::size_t> fold_sizes;
  std::size_t n_samples = 0;
  std::size_t n_stations = 0;
  std::string fold_granularity;
  nlohmann::ordered_json config_echo;
  std::vector<SkipEntry> skip_log;  // carried from ingestion when available

  // Deterministic document: everything except wall-clock timings.
  nlohmann::ordered_json to_json() const;
  nlohmann::ordered_json timings_json() const;
};

// Five-fold (by default) cross-validated benchmark: per fold, every learner
// trains out-of-fold and predicts the held-out rows at all levels; raw
// predictions are calibrated (censor, then crossing) and scored with linear
// QR as benchmark. A non-benchmark learner that fails to fit is recorded and
// excluded; a failing benchmark learner aborts the run.
EvaluationReport run_benchmark(const Dataset& ds, const BenchmarkConfig& cfg);

struct ImportanceReport {
  LevelGrid levels;
  std::vector<std::string> predictor_names;
  Matrix total_gain;                  // levels x predictors
  std::vector<std::vector<int>> ranks;  // levels x predictors, 1 = most important
};

// Gain-based importance from leafwise ensembles fitted per level on the full
// dataset. Ranks break ties by predictor index; a level with no recorded
// splits is an error.
ImportanceReport feature_importance(const std::vector<BoostEnsemble>& per_level,
                                    const LevelGrid& grid,
                                    const std::vector<std::string>& predictor_names);

std::vector<BoostEnsemble> fit_importance_ensembles(const Dataset& ds, BoostConfig leafwise_cfg,
                                                    const LevelGrid& grid, std::uint64_t seed,
                                                    int jobs);

}  // namespace precipuq
