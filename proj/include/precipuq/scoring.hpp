#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precipuq/levels.hpp"

namespace precipuq {

// Quantile scoring function ("pinball loss"): with x = z - y,
//   L_alpha(z, y) = x * (1{x >= 0} - alpha).
// Nonnegative, zero iff z == y, and its expectation is minimized by the true
// alpha-quantile. At alpha = 1/2 it reduces to |z - y| / 2.
double pinball(double z, double y, double alpha);

// Arithmetic mean of pinball over prediction/observation pairs.
double mean_quantile_score(std::span<const double> z, std::span<const double> y, double alpha);

// Skill against a benchmark score: 1 - score / benchmark. Applies identically
// to mean quantile scores and mean scoring rules. Positive means better than
// the benchmark; equal scores give exactly 0.
double skill(double score_learner, double score_benchmark);

// Quantile scoring rule: the sum of pinball losses of one sample's predictive
// quantiles across all levels. Proper for the predictive distribution.
double quantile_scoring_rule(std::span<const double> zs, double y, const LevelGrid& grid);

// Empirical frequency of z_i >= y_i; ideally equals the nominal level.
double coverage(std::span<const double> z, std::span<const double> y);

// Per-(learner, station) skills against the benchmark learner, either at one
// level (level_index set) or for the scoring rule (level_index empty).
// Stations where the benchmark score vanishes get an explicit nullopt.
using StationSkillMap = std::map<std::string, std::map<std::string, std::optional<double>>>;

StationSkillMap per_station_skill(
    const std::map<std::string, QuantilePredictions>& preds_by_learner,
    std::span<const double> obs,
    const std::map<std::string, std::vector<std::size_t>>& station_index,
    const std::string& benchmark_learner, std::optional<std::size_t> level_index);

// Aggregated evaluation statistics for a set of learners over one level grid.
struct ScoreTable {
  std::vector<std::string> learners;  // presentation order
  LevelGrid grid;
  std::map<std::string, std::vector<double>> mean_score;      // per level
  std::map<std::string, std::vector<double>> coverage;        // per level
  std::map<std::string, std::vector<double>> skill_by_level;  // per level
  std::map<std::string, double> mean_scoring_rule;
  std::map<std::string, double> scoring_rule_skill;
  // learner -> station -> per-level skills (nullopt where undefined)
  std::map<std::string, std::map<std::string, std::vector<std::optional<double>>>>
      station_skill_by_level;
  StationSkillMap station_scoring_rule_skill;
};

// Builds the full table from out-of-fold predictions. All predictions must be
// calibrated and aligned with obs.
ScoreTable score_predictions(const std::map<std::string, QuantilePredictions>& preds_by_learner,
                             std::span<const double> obs,
                             const std::map<std::string, std::vector<std::size_t>>& station_index,
                             const std::string& benchmark_learner,
                             const std::vector<std::string>& learner_order);

}  // namespace precipuq
