#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "precipuq/calibrate.hpp"
#include "precipuq/rng.hpp"
#include "precipuq/scoring.hpp"

using namespace precipuq;

TEST_CASE("pinball reference values") {
  CHECK(pinball(3.0, 1.0, 0.5) == 1.0);
  CHECK(pinball(0.0, 10.0, 0.9) == 9.0);
  CHECK(pinball(7.25, 7.25, 0.3) == 0.0);
  CHECK_THROWS_AS(pinball(1.0, 2.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(pinball(1.0, 2.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(pinball(1.0, 2.0, -0.1), std::invalid_argument);
}

TEST_CASE("pinball at one half is exactly half the absolute error") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double z = rng.uniform(-100, 100);
    const double y = rng.uniform(-100, 100);
    CHECK(pinball(z, y, 0.5) == std::abs(z - y) / 2.0);  // bitwise, both scale by 0.5
  }
}

TEST_CASE("pinball is nonnegative, zero only at the observation") {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double z = rng.uniform(-50, 50);
    const double y = rng.uniform(-50, 50);
    const double alpha = rng.uniform(0.01, 0.99);
    const double loss = pinball(z, y, alpha);
    CHECK(loss >= 0.0);
    if (z != y) CHECK(loss > 0.0);
  }
}

TEST_CASE("mean_quantile_score") {
  const std::vector<double> y = {2.0, 2.0};
  CHECK(mean_quantile_score(y, y, 0.3) == 0.0);
  const std::vector<double> zeros = {0.0, 0.0};
  const std::vector<double> tens = {10.0, 10.0};
  CHECK(mean_quantile_score(zeros, tens, 0.9) == doctest::Approx(9.0).epsilon(1e-15));
  const std::vector<double> z = {1.0, 3.0};
  CHECK(mean_quantile_score(z, y, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(mean_quantile_score({}, {}, 0.5), std::invalid_argument);
}

TEST_CASE("skill") {
  CHECK(skill(0.7, 0.7) == 0.0);  // exact equality contract
  CHECK(skill(0.8, 1.0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK_THROWS_WITH_AS(skill(1.0, 0.0), "skill: degenerate benchmark", std::invalid_argument);
  // Strictly decreasing in the learner score.
  double prev = skill(0.1, 2.0);
  for (double s = 0.2; s < 3.0; s += 0.1) {
    const double cur = skill(s, 2.0);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("quantile_scoring_rule") {
  LevelGrid one({0.35});
  const std::vector<double> z1 = {4.0};
  CHECK(quantile_scoring_rule(z1, 2.5, one) == pinball(4.0, 2.5, 0.35));

  LevelGrid two({0.25, 0.75});
  const std::vector<double> hit = {2.0, 2.0};
  CHECK(quantile_scoring_rule(hit, 2.0, two) == 0.0);
  const std::vector<double> z = {1.0, 3.0};
  CHECK(quantile_scoring_rule(z, 2.0, two) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(quantile_scoring_rule(z1, 2.0, two), std::invalid_argument);
}

TEST_CASE("quantile_scoring_rule equals the per-level sum") {
  Rng rng(8);
  LevelGrid grid;  // nine defaults
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> zs(grid.size());
    for (auto& z : zs) z = rng.uniform(-20, 80);
    const double y = rng.uniform(-20, 80);
    double plain = 0.0;
    for (std::size_t l = 0; l < grid.size(); ++l) plain += pinball(zs[l], y, grid[l]);
    CHECK(std::abs(quantile_scoring_rule(zs, y, grid) - plain) <= 1e-12);
  }
}

TEST_CASE("coverage") {
  const std::vector<double> y = {1.0, 2.0, 3.0, 4.0};
  CHECK(coverage(y, y) == 1.0);  // ties count
  const std::vector<double> z = {0.0, 3.0, 3.0, 10.0};
  CHECK(coverage(z, y) == 0.75);
  const std::vector<double> all_below = {0.5, 1.5, 2.5, 3.5};
  CHECK(coverage(all_below, y) == 0.0);
  CHECK_THROWS_AS(coverage({}, {}), std::invalid_argument);
}

TEST_CASE("strict consistency: grid argmin of mean pinball hits the normal quantile") {
  // 100,000 seeded standard-normal draws; mean pinball at alpha = 0.9 over
  // z in [-3, 3] step 0.01 must dip nearest 1.2816.
  Rng rng(20240409);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  for (auto& d : draws) d = rng.normal();

  double best_z = -3.0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int step = 0; step <= 600; ++step) {
    const double z = -3.0 + 0.01 * step;
    double acc = 0.0;
    for (double y : draws) {
      const double x = z - y;
      acc += x * ((x >= 0.0 ? 1.0 : 0.0) - 0.9);
    }
    const double loss = acc / static_cast<double>(n);
    if (loss < best_loss) {
      best_loss = loss;
      best_z = z;
    }
  }
  CHECK(std::abs(best_z - 1.2816) <= 0.05);
}

TEST_CASE("per_station_skill") {
  LevelGrid grid({0.5});
  const std::vector<double> obs = {0.0, 0.0, 10.0, 10.0};
  std::map<std::string, std::vector<std::size_t>> stations = {{"A", {0, 1}}, {"B", {2, 3}}};

  QuantilePredictions bench{Matrix(4, 1), grid, true};
  bench.values(0, 0) = 2.0;
  bench.values(1, 0) = 2.0;
  bench.values(2, 0) = 12.0;
  bench.values(3, 0) = 12.0;

  // Learner halves the benchmark error at station A, matches at station B.
  QuantilePredictions learner{Matrix(4, 1), grid, true};
  learner.values(0, 0) = 1.0;
  learner.values(1, 0) = 1.0;
  learner.values(2, 0) = 12.0;
  learner.values(3, 0) = 12.0;

  std::map<std::string, QuantilePredictions> preds = {{"bench", bench}, {"learner", learner}};
  const auto skills = per_station_skill(preds, obs, stations, "bench", 0);
  CHECK(*skills.at("bench").at("A") == 0.0);
  CHECK(*skills.at("bench").at("B") == 0.0);
  CHECK(*skills.at("learner").at("A") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*skills.at("learner").at("B") == 0.0);

  // Single-sample station: skill is one minus the pinball ratio there.
  std::map<std::string, std::vector<std::size_t>> singles = {{"A", {0}}, {"B", {2}}};
  const auto single_skills = per_station_skill(preds, obs, singles, "bench", 0);
  const double expect = 1.0 - pinball(1.0, 0.0, 0.5) / pinball(2.0, 0.0, 0.5);
  CHECK(*single_skills.at("learner").at("A") == doctest::Approx(expect).epsilon(1e-12));

  // Zero benchmark score at a station: explicit null, not dropped.
  QuantilePredictions perfect{Matrix(4, 1), grid, true};
  perfect.values(0, 0) = 0.0;
  perfect.values(1, 0) = 0.0;
  perfect.values(2, 0) = 10.0;
  perfect.values(3, 0) = 10.0;
  std::map<std::string, QuantilePredictions> degenerate = {{"bench", perfect},
                                                           {"learner", learner}};
  const auto flagged = per_station_skill(degenerate, obs, stations, "bench", 0);
  CHECK_FALSE(flagged.at("learner").at("A").has_value());
  CHECK(flagged.at("learner").count("A") == 1);

  // Scoring-rule mode on the same inputs.
  const auto rule_skills = per_station_skill(preds, obs, stations, "bench", std::nullopt);
  CHECK(*rule_skills.at("learner").at("A") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("score_predictions fills every cell consistently") {
  Rng rng(33);
  LevelGrid grid;
  const std::size_t n = 40;
  std::vector<double> obs(n);
  for (auto& y : obs) y = rng.uniform(0, 30);
  std::map<std::string, std::vector<std::size_t>> stations;
  for (std::size_t i = 0; i < n; ++i) stations["s" + std::to_string(i / 10)].push_back(i);

  auto random_preds = [&](double shift) {
    QuantilePredictions qp{Matrix(n, grid.size()), grid, false};
    for (std::size_t i = 0; i < n; ++i) {
      double base = rng.uniform(0, 25);
      for (std::size_t l = 0; l < grid.size(); ++l) {
        qp.values(i, l) = base + shift + 2.0 * static_cast<double>(l);
      }
    }
    return fix_crossing(censor_lowest(qp));
  };
  std::map<std::string, QuantilePredictions> preds = {{"linear_qr", random_preds(0.0)},
                                                      {"other", random_preds(1.0)}};

  const auto table =
      score_predictions(preds, obs, stations, "linear_qr", {"linear_qr", "other"});
  for (const auto& learner : table.learners) {
    CHECK(table.mean_score.at(learner).size() == grid.size());
    CHECK(table.coverage.at(learner).size() == grid.size());
    for (double c : table.coverage.at(learner)) {
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
    }
    for (double s : table.mean_score.at(learner)) CHECK(s >= 0.0);
    // Skills replay Eq. 7 on the table's own scores.
    for (std::size_t l = 0; l < grid.size(); ++l) {
      const double replay =
          1.0 - table.mean_score.at(learner)[l] / table.mean_score.at("linear_qr")[l];
      CHECK(std::abs(table.skill_by_level.at(learner)[l] - replay) <= 1e-12);
    }
    const double rule_replay =
        1.0 - table.mean_scoring_rule.at(learner) / table.mean_scoring_rule.at("linear_qr");
    CHECK(std::abs(table.scoring_rule_skill.at(learner) - rule_replay) <= 1e-12);
  }
  CHECK(table.scoring_rule_skill.at("linear_qr") == 0.0);
  CHECK(table.station_skill_by_level.at("other").size() == stations.size());
}
