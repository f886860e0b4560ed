#include "precipuq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <mutex>
#include <numeric>
#include <stdexcept>

#include "precipuq/log.hpp"
#include "precipuq/parallel.hpp"
#include "precipuq/rng.hpp"

namespace precipuq {

std::vector<std::size_t> FoldPlan::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : assignment) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

std::vector<std::size_t> FoldPlan::rows_in_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldPlan::rows_outside_fold(int fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldPlan kfold_split(std::size_t n, int k, std::uint64_t seed, FoldGranularity granularity,
                     const std::map<std::string, std::vector<std::size_t>>* station_index) {
  if (k < 1) throw std::invalid_argument("kfold_split: k must be >= 1");
  if (static_cast<std::size_t>(k) > n) throw std::invalid_argument("kfold_split: k exceeds n");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.granularity = granularity;
  plan.assignment.assign(n, -1);
  Rng rng(seed);

  if (granularity == FoldGranularity::by_sample) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng.below(i + 1);
      std::swap(order[i], order[j]);
    }
    // Block partition: the first n % k folds take the extra sample.
    const std::size_t base = n / static_cast<std::size_t>(k);
    const std::size_t extra = n % static_cast<std::size_t>(k);
    std::size_t pos = 0;
    for (int f = 0; f < k; ++f) {
      const std::size_t size = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
      for (std::size_t i = 0; i < size; ++i) plan.assignment[order[pos++]] = f;
    }
  } else {
    if (station_index == nullptr || station_index->empty()) {
      throw std::invalid_argument("kfold_split: by_station needs a station index");
    }
    if (station_index->size() < static_cast<std::size_t>(k)) {
      throw std::invalid_argument("kfold_split: fewer stations than folds");
    }
    std::vector<const std::pair<const std::string, std::vector<std::size_t>>*> stations;
    for (const auto& entry : *station_index) stations.push_back(&entry);
    for (std::size_t i = stations.size() - 1; i > 0; --i) {
      const std::size_t j = rng.below(i + 1);
      std::swap(stations[i], stations[j]);
    }
    // Greedy balance: each station joins the currently smallest fold.
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (const auto* entry : stations) {
      const auto smallest = static_cast<int>(
          std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
      for (std::size_t i : entry->second) plan.assignment[i] = smallest;
      sizes[static_cast<std::size_t>(smallest)] += entry->second.size();
    }
  }

  for (int f : plan.assignment) {
    if (f < 0) throw std::logic_error("kfold_split: unassigned sample");
  }
  return plan;
}

LearnerConfig LearnerConfig::by_kind(const std::string& kind) {
  LearnerConfig cfg;
  cfg.kind = kind;
  if (kind == "boost_levelwise") {
    cfg.boost = BoostConfig::levelwise_defaults();
  } else if (kind == "boost_leafwise") {
    cfg.boost = BoostConfig::leafwise_defaults();
  } else if (kind != "linear_qr" && kind != "qrf" && kind != "qrnn" && kind != "oracle") {
    throw std::invalid_argument("unknown learner kind: " + kind);
  }
  return cfg;
}

namespace {

nlohmann::ordered_json learner_config_json(const LearnerConfig& cfg) {
  nlohmann::ordered_json j;
  j["kind"] = cfg.kind;
  if (cfg.kind == "linear_qr") {
    j["tolerance"] = cfg.linear.tolerance;
    j["max_iter_per_stage"] = cfg.linear.max_iter_per_stage;
  } else if (cfg.kind == "qrf") {
    j["n_trees"] = cfg.forest.n_trees;
    j["mtry"] = cfg.forest.mtry;
    j["min_leaf"] = cfg.forest.min_leaf;
    j["bootstrap"] = cfg.forest.bootstrap;
  } else if (cfg.kind == "boost_levelwise" || cfg.kind == "boost_leafwise") {
    j["n_iterations"] = cfg.boost.n_iterations;
    j["learning_rate"] = cfg.boost.learning_rate;
    j["max_depth"] = cfg.boost.max_depth;
    j["max_leaves"] = cfg.boost.max_leaves;
    j["min_data_in_leaf"] = cfg.boost.min_data_in_leaf;
    j["feature_fraction"] = cfg.boost.feature_fraction;
    j["bagging_fraction"] = cfg.boost.bagging_fraction;
    j["min_split_gain"] = cfg.boost.min_split_gain;
    if (cfg.kind == "boost_leafwise") j["max_bins"] = cfg.boost.max_bins;
  } else if (cfg.kind == "qrnn") {
    j["hidden_width"] = cfg.qrnn.hidden_width;
    j["n_trials"] = cfg.qrnn.n_trials;
    j["max_iter_per_stage"] = cfg.qrnn.max_iter_per_stage;
  } else if (cfg.kind == "oracle") {
    j["scenario"] = cfg.oracle_scenario;
  }
  return j;
}

nlohmann::ordered_json benchmark_config_json(const BenchmarkConfig& cfg) {
  nlohmann::ordered_json j;
  j["levels"] = cfg.levels.levels();
  j["folds"] = cfg.folds;
  j["seed"] = cfg.seed;
  j["fold_granularity"] =
      cfg.granularity == FoldGranularity::by_sample ? "by_sample" : "by_station";
  j["benchmark_learner"] = cfg.benchmark_learner;
  nlohmann::ordered_json learners = nlohmann::ordered_json::array();
  for (const auto& lc : cfg.learners) learners.push_back(learner_config_json(lc));
  j["learners"] = std::move(learners);
  return j;
}

struct FoldData {
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  Matrix x_train;
  Matrix x_test;
  std::vector<double> y_train;
};

struct BenchTask {
  std::string label;
  std::function<void()> work;
};

}  // namespace

EvaluationReport run_benchmark(const Dataset& ds, const BenchmarkConfig& cfg) {
  if (ds.samples.empty()) throw std::invalid_argument("run_benchmark: empty dataset");
  if (cfg.learners.empty()) throw std::invalid_argument("run_benchmark: no learners configured");
  {
    std::vector<std::string> kinds;
    for (const auto& lc : cfg.learners) kinds.push_back(lc.kind);
    std::sort(kinds.begin(), kinds.end());
    if (std::adjacent_find(kinds.begin(), kinds.end()) != kinds.end()) {
      throw std::invalid_argument("run_benchmark: duplicate learner kind");
    }
  }
  const bool has_benchmark = std::any_of(cfg.learners.begin(), cfg.learners.end(),
                                         [&](const auto& lc) { return lc.kind == cfg.benchmark_learner; });
  if (!has_benchmark) throw std::invalid_argument("run_benchmark: benchmark learner missing");

  const std::size_t n = ds.samples.size();
  const std::size_t n_levels = cfg.levels.size();

  const FoldPlan plan = kfold_split(n, cfg.folds, derive_seed(cfg.seed, 0xF01D),
                                    cfg.granularity,
                                    cfg.granularity == FoldGranularity::by_station
                                        ? &ds.station_index
                                        : nullptr);

  std::vector<FoldData> folds(static_cast<std::size_t>(cfg.folds));
  for (int f = 0; f < cfg.folds; ++f) {
    auto& fd = folds[static_cast<std::size_t>(f)];
    fd.train_rows = plan.rows_outside_fold(f);
    fd.test_rows = plan.rows_in_fold(f);
    fd.x_train = features_matrix(ds, fd.train_rows);
    fd.x_test = features_matrix(ds, fd.test_rows);
    fd.y_train = targets(ds, fd.train_rows);
  }

  // Out-of-fold raw predictions per learner, filled by disjoint tasks.
  std::map<std::string, QuantilePredictions> raw;
  for (const auto& lc : cfg.learners) {
    raw[lc.kind] = QuantilePredictions{Matrix(n, n_levels), cfg.levels, false};
  }

  std::map<std::string, std::string> failed;
  std::mutex failed_mu;
  auto record_failure = [&](const std::string& kind, const std::string& reason) {
    std::lock_guard<std::mutex> lock(failed_mu);
    failed.emplace(kind, reason);
  };

  std::vector<BenchTask> tasks;
  for (int f = 0; f < cfg.folds; ++f) {
    const auto& fd = folds[static_cast<std::size_t>(f)];
    for (std::size_t li = 0; li < cfg.learners.size(); ++li) {
      const LearnerConfig& lc = cfg.learners[li];
      Matrix& out = raw[lc.kind].values;
      const std::uint64_t learner_seed = derive_seed(cfg.seed, li + 1);
      const std::string base_label = "fold" + std::to_string(f) + "/" + lc.kind;

      if (lc.kind == "qrf") {
        tasks.push_back({base_label, [&, f, learner_seed]() {
          ForestConfig fc = lc.forest;
          fc.seed = derive_seed(learner_seed, static_cast<std::uint64_t>(f));
          fc.jobs = 1;
          const QuantileForest forest = fit_qrf(fd.x_train, fd.y_train, fc);
          QrfPredictor predictor(forest);
          for (std::size_t r = 0; r < fd.test_rows.size(); ++r) {
            const auto q = predictor.predict(fd.x_test.row(r), cfg.levels);
            for (std::size_t l = 0; l < n_levels; ++l) out(fd.test_rows[r], l) = q[l];
          }
        }});
      } else if (lc.kind == "oracle") {
        tasks.push_back({base_label, [&, f]() {
          const auto scenario = SyntheticScenario::by_name(lc.oracle_scenario, 1, 0);
          for (std::size_t r = 0; r < fd.test_rows.size(); ++r) {
            for (std::size_t l = 0; l < n_levels; ++l) {
              out(fd.test_rows[r], l) = scenario.quantile(fd.x_test.row(r), cfg.levels[l]);
            }
          }
        }});
      } else {
        for (std::size_t l = 0; l < n_levels; ++l) {
          const std::string label = base_label + "/level" + std::to_string(l);
          tasks.push_back({label, [&, f, l, learner_seed]() {
            const double alpha = cfg.levels[l];
            const std::uint64_t task_seed =
                derive_seed(learner_seed, static_cast<std::uint64_t>(f) * 64 + l);
            if (lc.kind == "linear_qr") {
              const auto model = fit_linear_qr(fd.x_train, fd.y_train, alpha, lc.linear);
              for (std::size_t r = 0; r < fd.test_rows.size(); ++r) {
                out(fd.test_rows[r], l) = predict_linear(model, fd.x_test.row(r));
              }
            } else if (lc.kind == "boost_levelwise" || lc.kind == "boost_leafwise") {
              BoostConfig bc = lc.boost;
              bc.alpha = alpha;
              bc.seed = task_seed;
              const auto ensemble = fit_boost(fd.x_train, fd.y_train, bc);
              for (std::size_t r = 0; r < fd.test_rows.size(); ++r) {
                out(fd.test_rows[r], l) = predict_boost(ensemble, fd.x_test.row(r));
              }
            } else if (lc.kind == "qrnn") {
              QrnnConfig qc = lc.qrnn;
              qc.seed = task_seed;
              const auto model = fit_qrnn(fd.x_train, fd.y_train, alpha, qc);
              for (std::size_t r = 0; r < fd.test_rows.size(); ++r) {
                out(fd.test_rows[r], l) = predict_qrnn(model, fd.x_test.row(r));
              }
            } else {
              throw std::invalid_argument("unknown learner kind: " + lc.kind);
            }
          }});
        }
      }
    }
  }

  std::vector<double> task_seconds(tasks.size(), 0.0);
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t t) {
    const auto start = std::chrono::steady_clock::now();
    try {
      tasks[t].work();
    } catch (const std::exception& e) {
      // Task labels start with "foldN/<kind>".
      const auto& label = tasks[t].label;
      const auto slash = label.find('/');
      auto end = label.find('/', slash + 1);
      if (end == std::string::npos) end = label.size();
      record_failure(label.substr(slash + 1, end - slash - 1), e.what());
    }
    task_seconds[t] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  if (failed.count(cfg.benchmark_learner)) {
    throw std::runtime_error("run_benchmark: benchmark learner failed: " +
                             failed.at(cfg.benchmark_learner));
  }
  for (const auto& [kind, reason] : failed) {
    log::error("learner " + kind + " failed: " + reason);
    raw.erase(kind);
  }

  EvaluationReport report;
  report.failed_learners = failed;
  report.fold_sizes = plan.fold_sizes();
  report.n_samples = n;
  report.n_stations = ds.station_index.size();
  report.fold_granularity =
      cfg.granularity == FoldGranularity::by_sample ? "by_sample" : "by_station";
  report.config_echo = benchmark_config_json(cfg);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    report.timings.emplace_back(tasks[t].label, task_seconds[t]);
  }

  // Calibrate (censor, then crossing) before any scoring.
  std::map<std::string, QuantilePredictions> calibrated;
  for (auto& [kind, preds] : raw) {
    CalibrationLog clog;
    calibrated[kind] = calibrate(std::move(preds), &clog);
    report.calibration[kind] = clog;
  }

  std::vector<std::string> order;
  for (const auto& lc : cfg.learners) {
    if (!failed.count(lc.kind)) order.push_back(lc.kind);
  }
  const auto obs = targets(ds);
  report.table =
      score_predictions(calibrated, obs, ds.station_index, cfg.benchmark_learner, order);
  return report;
}

nlohmann::ordered_json EvaluationReport::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["kind"] = "evaluation_report";
  j["config"] = config_echo;
  j["n_samples"] = n_samples;
  j["n_stations"] = n_stations;
  j["fold_granularity"] = fold_granularity;
  j["fold_sizes"] = fold_sizes;
  j["levels"] = table.grid.levels();

  nlohmann::ordered_json failed = nlohmann::ordered_json::object();
  for (const auto& [kind, reason] : failed_learners) failed[kind] = reason;
  j["failed_learners"] = std::move(failed);

  auto opt_json = [](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
  };

  nlohmann::ordered_json scores = nlohmann::ordered_json::object();
  for (const auto& learner : table.learners) {
    nlohmann::ordered_json cell;
    cell["mean_score"] = table.mean_score.at(learner);
    cell["coverage"] = table.coverage.at(learner);
    cell["skill"] = table.skill_by_level.at(learner);
    cell["mean_scoring_rule"] = table.mean_scoring_rule.at(learner);
    cell["scoring_rule_skill"] = table.scoring_rule_skill.at(learner);
    scores[learner] = std::move(cell);
  }
  for (const auto& [kind, _] : failed_learners) {
    nlohmann::ordered_json cell;
    cell["mean_score"] = nullptr;
    cell["coverage"] = nullptr;
    cell["skill"] = nullptr;
    cell["mean_scoring_rule"] = nullptr;
    cell["scoring_rule_skill"] = nullptr;
    scores[kind] = std::move(cell);
  }
  j["scores"] = std::move(scores);

  nlohmann::ordered_json stations = nlohmann::ordered_json::object();
  for (const auto& learner : table.learners) {
    nlohmann::ordered_json per_station = nlohmann::ordered_json::object();
    const auto by_level_it = table.station_skill_by_level.find(learner);
    const auto rule_it = table.station_scoring_rule_skill.find(learner);
    if (by_level_it != table.station_skill_by_level.end()) {
      for (const auto& [station, skills] : by_level_it->second) {
        nlohmann::ordered_json cell;
        nlohmann::ordered_json by_level = nlohmann::ordered_json::array();
        for (const auto& s : skills) by_level.push_back(opt_json(s));
        cell["by_level"] = std::move(by_level);
        cell["scoring_rule"] = opt_json(rule_it->second.at(station));
        per_station[station] = std::move(cell);
      }
    }
    stations[learner] = std::move(per_station);
  }
  j["station_skills"] = std::move(stations);

  nlohmann::ordered_json calib = nlohmann::ordered_json::object();
  for (const auto& [kind, clog] : calibration) {
    calib[kind] = {{"n_censored", clog.n_censored}, {"n_crossings_fixed", clog.n_crossings_fixed}};
  }
  j["calibration"] = std::move(calib);

  std::map<std::string, std::size_t> skip_counts;
  for (const auto& s : skip_log) ++skip_counts[s.reason];
  j["skip_summary"] = skip_counts;
  return j;
}

nlohmann::ordered_json EvaluationReport::timings_json() const {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& [label, seconds] : timings) {
    arr.push_back({{"task", label}, {"seconds", seconds}});
  }
  nlohmann::ordered_json j;
  j["timings"] = std::move(arr);
  return j;
}

ImportanceReport feature_importance(const std::vector<BoostEnsemble>& per_level,
                                    const LevelGrid& grid,
                                    const std::vector<std::string>& predictor_names) {
  if (per_level.size() != grid.size()) {
    throw std::invalid_argument("feature_importance: one ensemble per level required");
  }
  const std::size_t p = predictor_names.size();

  ImportanceReport report;
  report.levels = grid;
  report.predictor_names = predictor_names;
  report.total_gain = Matrix(grid.size(), p);
  report.ranks.assign(grid.size(), std::vector<int>(p, 0));

  for (std::size_t l = 0; l < grid.size(); ++l) {
    const auto& gains = per_level[l].total_gain;
    if (gains.size() != p) {
      throw std::invalid_argument("feature_importance: predictor count mismatch");
    }
    double total = 0.0;
    for (std::size_t f = 0; f < p; ++f) {
      report.total_gain(l, f) = gains[f];
      total += gains[f];
    }
    if (!(total > 0.0)) throw std::runtime_error("no splits recorded");

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (gains[a] != gains[b]) return gains[a] > gains[b];
      return a < b;  // ties by predictor index
    });
    for (std::size_t pos = 0; pos < p; ++pos) {
      report.ranks[l][order[pos]] = static_cast<int>(pos) + 1;
    }
  }
  return report;
}

std::vector<BoostEnsemble> fit_importance_ensembles(const Dataset& ds, BoostConfig leafwise_cfg,
                                                    const LevelGrid& grid, std::uint64_t seed,
                                                    int jobs) {
  const Matrix x = features_matrix(ds);
  const std::vector<double> y = targets(ds);
  std::vector<BoostEnsemble> ensembles(grid.size());
  parallel_for(grid.size(), jobs, [&](std::size_t l) {
    BoostConfig bc = leafwise_cfg;
    bc.mode = GrowthMode::leafwise;
    bc.alpha = grid[l];
    bc.seed = derive_seed(seed, l + 1);
    ensembles[l] = fit_boost(x, y, bc);
  });
  return ensembles;
}

}  // namespace precipuq
