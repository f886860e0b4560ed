#include "precipuq/scoring.hpp"

#include <cmath>
#include <stdexcept>

namespace precipuq {

double pinball(double z, double y, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("pinball: alpha must lie in (0, 1)");
  }
  const double x = z - y;
  return x * ((x >= 0.0 ? 1.0 : 0.0) - alpha);
}

double mean_quantile_score(std::span<const double> z, std::span<const double> y, double alpha) {
  if (z.empty() || z.size() != y.size()) {
    throw std::invalid_argument("mean_quantile_score: need equal nonempty inputs");
  }
  std::vector<double> losses(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) losses[i] = pinball(z[i], y[i], alpha);
  return pairwise_mean(losses);
}

double skill(double score_learner, double score_benchmark) {
  if (!(score_benchmark > 0.0)) throw std::invalid_argument("skill: degenerate benchmark");
  return 1.0 - score_learner / score_benchmark;
}

double quantile_scoring_rule(std::span<const double> zs, double y, const LevelGrid& grid) {
  if (zs.size() != grid.size()) {
    throw std::invalid_argument("quantile_scoring_rule: predictions/levels length mismatch");
  }
  std::vector<double> losses(zs.size());
  for (std::size_t i = 0; i < zs.size(); ++i) losses[i] = pinball(zs[i], y, grid[i]);
  return pairwise_sum(losses);
}

double coverage(std::span<const double> z, std::span<const double> y) {
  if (z.empty() || z.size() != y.size()) {
    throw std::invalid_argument("coverage: need equal nonempty inputs");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] >= y[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(z.size());
}

namespace {

// Mean score of one station's samples: pinball at one level, or the scoring
// rule across all levels.
double station_mean_score(const QuantilePredictions& preds, std::span<const double> obs,
                          const std::vector<std::size_t>& rows,
                          std::optional<std::size_t> level_index) {
  std::vector<double> losses;
  losses.reserve(rows.size());
  for (std::size_t i : rows) {
    if (level_index) {
      losses.push_back(pinball(preds.values(i, *level_index), obs[i], preds.grid[*level_index]));
    } else {
      losses.push_back(quantile_scoring_rule(preds.values.row(i), obs[i], preds.grid));
    }
  }
  return pairwise_mean(losses);
}

}  // namespace

StationSkillMap per_station_skill(
    const std::map<std::string, QuantilePredictions>& preds_by_learner,
    std::span<const double> obs,
    const std::map<std::string, std::vector<std::size_t>>& station_index,
    const std::string& benchmark_learner, std::optional<std::size_t> level_index) {
  const auto bench_it = preds_by_learner.find(benchmark_learner);
  if (bench_it == preds_by_learner.end()) {
    throw std::invalid_argument("per_station_skill: benchmark learner missing");
  }
  for (const auto& [_, rows] : station_index) {
    if (rows.empty()) throw std::invalid_argument("per_station_skill: station without samples");
  }

  // Benchmark score per station, computed once.
  std::map<std::string, double> bench_scores;
  for (const auto& [station, rows] : station_index) {
    bench_scores[station] = station_mean_score(bench_it->second, obs, rows, level_index);
  }

  StationSkillMap out;
  for (const auto& [learner, preds] : preds_by_learner) {
    auto& per_station = out[learner];
    for (const auto& [station, rows] : station_index) {
      const double bench = bench_scores[station];
      if (!(bench > 0.0)) {
        per_station[station] = std::nullopt;  // undefined, flagged explicitly
        continue;
      }
      per_station[station] = skill(station_mean_score(preds, obs, rows, level_index), bench);
    }
  }
  return out;
}

ScoreTable score_predictions(const std::map<std::string, QuantilePredictions>& preds_by_learner,
                             std::span<const double> obs,
                             const std::map<std::string, std::vector<std::size_t>>& station_index,
                             const std::string& benchmark_learner,
                             const std::vector<std::string>& learner_order) {
  if (!preds_by_learner.count(benchmark_learner)) {
    throw std::invalid_argument("score_predictions: benchmark learner missing");
  }

  ScoreTable table;
  table.learners = learner_order;
  table.grid = preds_by_learner.begin()->second.grid;
  const std::size_t n_levels = table.grid.size();

  for (const auto& [learner, preds] : preds_by_learner) {
    if (preds.grid.levels() != table.grid.levels() || preds.n_samples() != obs.size()) {
      throw std::invalid_argument("score_predictions: inconsistent prediction shapes");
    }
    std::vector<double>& scores = table.mean_score[learner];
    std::vector<double>& covs = table.coverage[learner];
    scores.resize(n_levels);
    covs.resize(n_levels);
    std::vector<double> col(obs.size());
    for (std::size_t l = 0; l < n_levels; ++l) {
      for (std::size_t i = 0; i < obs.size(); ++i) col[i] = preds.values(i, l);
      scores[l] = mean_quantile_score(col, obs, table.grid[l]);
      covs[l] = coverage(col, obs);
    }
    std::vector<double> rule(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i) {
      rule[i] = quantile_scoring_rule(preds.values.row(i), obs[i], table.grid);
    }
    table.mean_scoring_rule[learner] = pairwise_mean(rule);
  }

  const auto& bench_scores = table.mean_score.at(benchmark_learner);
  const double bench_rule = table.mean_scoring_rule.at(benchmark_learner);
  for (const auto& [learner, scores] : table.mean_score) {
    auto& skills = table.skill_by_level[learner];
    skills.resize(n_levels);
    for (std::size_t l = 0; l < n_levels; ++l) skills[l] = skill(scores[l], bench_scores[l]);
    table.scoring_rule_skill[learner] = skill(table.mean_scoring_rule.at(learner), bench_rule);
  }

  if (!station_index.empty()) {
    for (std::size_t l = 0; l < n_levels; ++l) {
      auto by_level = per_station_skill(preds_by_learner, obs, station_index, benchmark_learner, l);
      for (auto& [learner, stations] : by_level) {
        for (auto& [station, value] : stations) {
          auto& slot = table.station_skill_by_level[learner][station];
          if (slot.empty()) slot.resize(n_levels);
          slot[l] = value;
        }
      }
    }
    table.station_scoring_rule_skill =
        per_station_skill(preds_by_learner, obs, station_index, benchmark_learner, std::nullopt);
  }
  return table;
}

}  // namespace precipuq
