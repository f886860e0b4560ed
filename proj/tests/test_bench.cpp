#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "precipuq/bench.hpp"
#include "precipuq/dataset_io.hpp"
#include "precipuq/report_io.hpp"
#include "precipuq/rng.hpp"
#include "test_util.hpp"

using namespace precipuq;

namespace {

BenchmarkConfig quick_config(std::vector<std::string> kinds, std::uint64_t seed = 5) {
  BenchmarkConfig cfg;
  cfg.levels = LevelGrid({0.1, 0.5, 0.9});
  cfg.seed = seed;
  cfg.folds = 3;
  for (const auto& kind : kinds) {
    auto lc = LearnerConfig::by_kind(kind);
    if (kind == "qrf") {
      lc.forest.n_trees = 20;
      lc.forest.min_leaf = 4;
    } else if (kind == "boost_leafwise" || kind == "boost_levelwise") {
      lc.boost.n_iterations = 15;
      lc.boost.min_data_in_leaf = 5;
    } else if (kind == "qrnn") {
      lc.qrnn.max_iter_per_stage = 25;
    } else if (kind == "linear_qr") {
      lc.linear.max_iter_per_stage = 120;
    }
    cfg.learners.push_back(lc);
  }
  return cfg;
}

}  // namespace

TEST_CASE("normal_quantile against frozen constants and the erfc CDF") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.9) == doctest::Approx(1.2815515655446004).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(1e-4) == doctest::Approx(-3.719016485455709).epsilon(1e-10));
  CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);

  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const double p = rng.uniform(1e-6, 1.0 - 1e-6);
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-9));
  }
}

TEST_CASE("rng streams are reproducible") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
    CHECK(std::isfinite(u.normal()));
  }
}

TEST_CASE("kfold_split partitions evenly") {
  const auto plan = kfold_split(10, 5, 1);
  const auto sizes = plan.fold_sizes();
  for (auto s : sizes) CHECK(s == 2);
  std::set<std::size_t> all;
  for (int f = 0; f < 5; ++f) {
    for (auto i : plan.rows_in_fold(f)) all.insert(i);
  }
  CHECK(all.size() == 10);

  // The paper-scale arithmetic: 91,623 = 3 * 18,325 + 2 * 18,324.
  const auto big = kfold_split(91623, 5, 99);
  const auto big_sizes = big.fold_sizes();
  std::multiset<std::size_t> expected = {18325, 18325, 18325, 18324, 18324};
  CHECK(std::multiset<std::size_t>(big_sizes.begin(), big_sizes.end()) == expected);

  const auto again = kfold_split(91623, 5, 99);
  CHECK(again.assignment == big.assignment);

  CHECK_THROWS_AS(kfold_split(3, 5, 0), std::invalid_argument);
}

TEST_CASE("kfold_split by station keeps stations whole") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 1500, 3));
  const auto plan = kfold_split(data.dataset.size(), 3, 17, FoldGranularity::by_station,
                                &data.dataset.station_index);
  for (const auto& [station, rows] : data.dataset.station_index) {
    std::set<int> folds;
    for (auto i : rows) folds.insert(plan.assignment[i]);
    CHECK(folds.size() == 1);
  }
  const auto sizes = plan.fold_sizes();
  CHECK(*std::min_element(sizes.begin(), sizes.end()) > 0);
}

TEST_CASE("synthetic oracle identities") {
  const auto scenario = SyntheticScenario::by_name("hetero", 10, 7);
  std::vector<double> x(kNumPredictors, 0.3);
  CHECK(scenario.quantile(x, 0.5) == scenario.location(x));

  x[2] = 0.0;  // spread = 1
  const double width = scenario.quantile(x, 0.975) - scenario.quantile(x, 0.025);
  CHECK(width == doctest::Approx(2.0 * 1.959963984540054).epsilon(1e-9));
  CHECK(width == doctest::Approx(3.9199).epsilon(1e-4));

  // Strictly increasing in alpha.
  double prev = scenario.quantile(x, 0.01);
  for (double a = 0.05; a < 1.0; a += 0.05) {
    const double q = scenario.quantile(x, a);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("generate_synthetic is deterministic and block-stationed") {
  const auto a = generate_synthetic(SyntheticScenario::by_name("hetero", 450, 11));
  const auto b = generate_synthetic(SyntheticScenario::by_name("hetero", 450, 11));
  const auto dir = testutil::fresh_dir("synth_det");
  write_dataset_jsonl(a.dataset, dir / "a.jsonl");
  write_dataset_jsonl(b.dataset, dir / "b.jsonl");
  CHECK(testutil::read_file(dir / "a.jsonl") == testutil::read_file(dir / "b.jsonl"));

  CHECK(a.dataset.station_index.size() == 3);  // 450 samples in blocks of 200
  CHECK(a.dataset.station_index.at("st0000").size() == 200);
  CHECK(a.dataset.station_index.at("st0002").size() == 50);

  const auto c = generate_synthetic(SyntheticScenario::by_name("hetero", 450, 12));
  CHECK(c.dataset.samples[0].target_mm != a.dataset.samples[0].target_mm);
}

TEST_CASE("benchmark with only the benchmark learner has zero skills") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 300, 21));
  const auto report = run_benchmark(data.dataset, quick_config({"linear_qr"}));
  for (double s : report.table.skill_by_level.at("linear_qr")) CHECK(s == 0.0);
  CHECK(report.table.scoring_rule_skill.at("linear_qr") == 0.0);
}

TEST_CASE("benchmark report is internally consistent and complete") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 600, 22));
  auto cfg = quick_config({"linear_qr", "qrf", "oracle"});
  const auto report = run_benchmark(data.dataset, cfg);

  CHECK(report.failed_learners.empty());
  CHECK(report.n_samples == 600);
  CHECK(report.fold_sizes.size() == 3);

  // Every (learner, level) cell is filled.
  for (const auto& kind : {"linear_qr", "qrf", "oracle"}) {
    CHECK(report.table.coverage.at(kind).size() == cfg.levels.size());
    CHECK(report.table.mean_score.at(kind).size() == cfg.levels.size());
    CHECK(report.table.mean_scoring_rule.count(kind) == 1);
  }

  // Skills replay Eq. 7 against the benchmark's own mean scores.
  const auto& bench = report.table.mean_score.at("linear_qr");
  for (const auto& kind : {"qrf", "oracle"}) {
    for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
      const double replay = 1.0 - report.table.mean_score.at(kind)[l] / bench[l];
      CHECK(std::abs(report.table.skill_by_level.at(kind)[l] - replay) <= 1e-12);
    }
  }

  // The analytic oracle is strictly increasing in alpha, so calibration never
  // fires on it.
  CHECK(report.calibration.at("oracle").n_crossings_fixed == 0);
  CHECK(report.calibration.at("oracle").n_censored == 0);

  // Station skills cover every station for every learner.
  for (const auto& kind : {"linear_qr", "qrf", "oracle"}) {
    CHECK(report.table.station_skill_by_level.at(kind).size() ==
          data.dataset.station_index.size());
  }
}

TEST_CASE("oracle coverage tracks nominal levels") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 4000, 23));
  auto cfg = quick_config({"linear_qr", "oracle"});
  cfg.levels = LevelGrid();  // nine defaults
  cfg.folds = 2;
  const auto report = run_benchmark(data.dataset, cfg);
  for (std::size_t l = 0; l < cfg.levels.size(); ++l) {
    CHECK(std::abs(report.table.coverage.at("oracle")[l] - cfg.levels[l]) <= 0.03);
  }
}

TEST_CASE("failing learners are recorded, others proceed") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 200, 24));
  auto cfg = quick_config({"linear_qr", "qrf"});
  cfg.learners[1].forest.min_leaf = 10000;  // impossible
  const auto report = run_benchmark(data.dataset, cfg);
  CHECK(report.failed_learners.count("qrf") == 1);
  CHECK(report.table.mean_score.count("linear_qr") == 1);
  CHECK(report.table.mean_score.count("qrf") == 0);

  // Missing benchmark learner is a hard error.
  auto no_bench = quick_config({"qrf"});
  CHECK_THROWS_AS(run_benchmark(data.dataset, no_bench), std::invalid_argument);
}

TEST_CASE("parallel and sequential benchmarks agree byte for byte") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("hetero", 500, 25));
  auto cfg = quick_config({"linear_qr", "qrf", "boost_leafwise"});
  cfg.jobs = 1;
  const auto seq = run_benchmark(data.dataset, cfg);
  cfg.jobs = 4;
  const auto par = run_benchmark(data.dataset, cfg);
  CHECK(seq.to_json().dump(2) == par.to_json().dump(2));
}

TEST_CASE("feature importance ranks the single signal first") {
  const auto data = generate_synthetic(SyntheticScenario::by_name("single_signal", 2500, 26));
  BoostConfig cfg = BoostConfig::leafwise_defaults();
  cfg.n_iterations = 60;
  cfg.min_data_in_leaf = 50;
  LevelGrid grid({0.25, 0.5, 0.75});
  const auto ensembles = fit_importance_ensembles(data.dataset, cfg, grid, 4, 2);
  std::vector<std::string> names(data.dataset.predictor_names.begin(),
                                 data.dataset.predictor_names.end());
  const auto report = feature_importance(ensembles, grid, names);

  for (std::size_t l = 0; l < grid.size(); ++l) {
    CHECK(report.ranks[l][0] == 1);
    // Ranks are a permutation of 1..17.
    std::set<int> seen(report.ranks[l].begin(), report.ranks[l].end());
    CHECK(seen.size() == kNumPredictors);
    CHECK(*seen.begin() == 1);
    CHECK(*seen.rbegin() == static_cast<int>(kNumPredictors));
  }
}

TEST_CASE("swapping two noise columns swaps exactly their gains") {
  auto data = generate_synthetic(SyntheticScenario::by_name("single_signal", 1200, 27));
  BoostConfig cfg = BoostConfig::leafwise_defaults(0.5);
  cfg.n_iterations = 40;
  cfg.min_data_in_leaf = 30;
  // Feature subsampling selects indices, which would break the symmetry of a
  // column swap; with every feature in play, a swap is a pure relabeling.
  cfg.feature_fraction = 1.0;
  cfg.seed = 9;

  const Matrix x = features_matrix(data.dataset);
  const auto y = targets(data.dataset);
  const auto base = fit_boost(x, y, cfg);

  // Swap noise predictors 5 and 11 (indices 4 and 10).
  Matrix swapped = x;
  for (std::size_t i = 0; i < swapped.rows(); ++i) std::swap(swapped(i, 4), swapped(i, 10));
  const auto swapped_fit = fit_boost(swapped, y, cfg);

  CHECK(swapped_fit.total_gain[4] == base.total_gain[10]);
  CHECK(swapped_fit.total_gain[10] == base.total_gain[4]);
  for (std::size_t f = 0; f < kNumPredictors; ++f) {
    if (f == 4 || f == 10) continue;
    CHECK(swapped_fit.total_gain[f] == base.total_gain[f]);
  }
}

TEST_CASE("importance requires recorded splits") {
  LevelGrid grid({0.5});
  std::vector<BoostEnsemble> empty(1);
  empty[0].total_gain.assign(kNumPredictors, 0.0);
  std::vector<std::string> names(kNumPredictors, "x");
  CHECK_THROWS_WITH_AS(feature_importance(empty, grid, names), "no splits recorded",
                       std::runtime_error);
}
