#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "precipuq/forest.hpp"
#include "precipuq/rng.hpp"
#include "qrf_oracle.hpp"
#include "test_util.hpp"

using namespace precipuq;
using testutil::qrf_oracle_quantile;

namespace {

struct RandomProblem {
  Matrix x;
  std::vector<double> y;
};

RandomProblem random_problem(Rng& rng, std::size_t n, std::size_t p) {
  RandomProblem rp{Matrix(n, p), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) rp.x(i, j) = rng.uniform(0, 1);
    rp.y[i] = 3.0 * rp.x(i, 0) + rng.normal();
  }
  return rp;
}

}  // namespace

TEST_CASE("constant targets collapse every quantile") {
  Rng rng(1);
  const std::size_t n = 24;
  Matrix x(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) x(i, j) = rng.uniform(0, 1);
  }
  const std::vector<double> y(n, 6.5);
  ForestConfig cfg;
  cfg.n_trees = 10;
  cfg.min_leaf = 2;
  cfg.mtry = 2;
  cfg.seed = 4;
  const auto forest = fit_qrf(x, y, cfg);
  LevelGrid grid;
  const auto q = predict_qrf(forest, x.row(0), grid);
  for (double v : q) CHECK(v == 6.5);
}

TEST_CASE("fits are deterministic for a fixed seed") {
  Rng rng(2);
  const auto rp = random_problem(rng, 8, 2);
  ForestConfig cfg;
  cfg.n_trees = 2;
  cfg.min_leaf = 1;
  cfg.mtry = 1;
  cfg.seed = 99;
  const auto a = fit_qrf(rp.x, rp.y, cfg);
  const auto b = fit_qrf(rp.x, rp.y, cfg);
  REQUIRE(a.trees().size() == b.trees().size());
  for (std::size_t t = 0; t < a.trees().size(); ++t) {
    CHECK(a.trees()[t].members == b.trees()[t].members);
    REQUIRE(a.trees()[t].nodes.size() == b.trees()[t].nodes.size());
    for (std::size_t k = 0; k < a.trees()[t].nodes.size(); ++k) {
      CHECK(a.trees()[t].nodes[k].feature == b.trees()[t].nodes[k].feature);
      CHECK(a.trees()[t].nodes[k].threshold == b.trees()[t].nodes[k].threshold);
    }
  }
  // Thread count must not change the grown forest.
  ForestConfig par = cfg;
  par.jobs = 4;
  const auto c = fit_qrf(rp.x, rp.y, par);
  for (std::size_t t = 0; t < a.trees().size(); ++t) {
    CHECK(a.trees()[t].members == c.trees()[t].members);
  }
}

TEST_CASE("perfectly separating binary feature is chosen at the root") {
  const std::size_t n = 16;
  Matrix x(n, 1);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = i < n / 2 ? 0.0 : 1.0;
    y[i] = i < n / 2 ? 0.0 : 10.0;
  }
  ForestConfig cfg;
  cfg.n_trees = 20;
  cfg.min_leaf = 1;
  cfg.mtry = 1;
  cfg.seed = 7;
  const auto forest = fit_qrf(x, y, cfg);
  for (const auto& tree : forest.trees()) {
    bool has_low = false, has_high = false;
    for (auto m : tree.members) {
      (y[m] == 0.0 ? has_low : has_high) = true;
    }
    if (has_low && has_high) {
      CHECK(tree.nodes[0].feature == 0);
      CHECK(tree.nodes[0].threshold == 0.0);  // split between the two values
    }
  }
}

TEST_CASE("weights are a probability distribution over training rows") {
  Rng rng(3);
  const auto rp = random_problem(rng, 60, 4);
  ForestConfig cfg;
  cfg.n_trees = 25;
  cfg.min_leaf = 3;
  cfg.mtry = 2;
  cfg.seed = 11;
  const auto forest = fit_qrf(rp.x, rp.y, cfg);
  for (int probe = 0; probe < 10; ++probe) {
    std::vector<double> q(4);
    for (auto& v : q) v = rng.uniform(0, 1);
    const auto w = qrf_weights(forest, q);
    double total = 0.0;
    for (double v : w) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("predicted quantiles are monotone training atoms") {
  Rng rng(4);
  const auto rp = random_problem(rng, 50, 3);
  ForestConfig cfg;
  cfg.n_trees = 15;
  cfg.min_leaf = 4;
  cfg.mtry = 2;
  cfg.seed = 21;
  const auto forest = fit_qrf(rp.x, rp.y, cfg);
  LevelGrid grid;
  for (int probe = 0; probe < 10; ++probe) {
    std::vector<double> xq(3);
    for (auto& v : xq) v = rng.uniform(0, 1);
    const auto q = predict_qrf(forest, xq, grid);
    for (std::size_t l = 1; l < q.size(); ++l) CHECK(q[l] >= q[l - 1]);
    for (double v : q) {
      CHECK(std::find(rp.y.begin(), rp.y.end(), v) != rp.y.end());
    }
  }
}

TEST_CASE("left-continuous inverse picks the first atom reaching the mass") {
  std::vector<double> values(40);
  std::iota(values.begin(), values.end(), 1.0);
  const std::vector<double> weights(40, 0.025);
  CHECK(weighted_quantile(values, weights, 0.025) == 1.0);
  CHECK(weighted_quantile(values, weights, 0.5) == 20.0);
  CHECK(weighted_quantile(values, weights, 0.975) == 39.0);
}

TEST_CASE("predictions match the exhaustive oracle exactly") {
  Rng rng(5);
  LevelGrid grid;
  for (int instance = 0; instance < 10; ++instance) {
    const std::size_t n = 10 + rng.below(21);
    const std::size_t p = 1 + rng.below(4);
    const auto rp = random_problem(rng, n, p);
    ForestConfig cfg;
    cfg.n_trees = 1 + static_cast<int>(rng.below(5));
    cfg.min_leaf = 1 + static_cast<int>(rng.below(3));
    cfg.mtry = 1 + static_cast<int>(rng.below(p));
    cfg.seed = rng.next_u64();
    const auto forest = fit_qrf(rp.x, rp.y, cfg);
    for (int probe = 0; probe < 5; ++probe) {
      std::vector<double> xq(p);
      for (auto& v : xq) v = rng.uniform(0, 1);
      const auto got = predict_qrf(forest, xq, grid);
      for (std::size_t l = 0; l < grid.size(); ++l) {
        CHECK(got[l] == qrf_oracle_quantile(forest, xq, grid[l]));
      }
    }
  }
}

TEST_CASE("binary container round trip") {
  Rng rng(6);
  const auto rp = random_problem(rng, 30, 3);
  ForestConfig cfg;
  cfg.n_trees = 5;
  cfg.min_leaf = 2;
  cfg.mtry = 2;
  cfg.seed = 77;
  const auto forest = fit_qrf(rp.x, rp.y, cfg);
  const auto dir = testutil::fresh_dir("forest_io");
  forest.save(dir / "forest.bin");
  const auto loaded = QuantileForest::load(dir / "forest.bin");
  CHECK(loaded.config().n_trees == cfg.n_trees);
  CHECK(loaded.train_targets() == forest.train_targets());
  LevelGrid grid;
  for (int probe = 0; probe < 5; ++probe) {
    std::vector<double> xq(3);
    for (auto& v : xq) v = rng.uniform(0, 1);
    CHECK(predict_qrf(loaded, xq, grid) == predict_qrf(forest, xq, grid));
  }
}

TEST_CASE("fit_qrf rejects empty or undersized data") {
  Matrix x(0, 2);
  CHECK_THROWS_AS(fit_qrf(x, {}, ForestConfig{}), std::invalid_argument);
  Matrix small(3, 1);
  small(0, 0) = 1;
  small(1, 0) = 2;
  small(2, 0) = 3;
  const std::vector<double> y = {1.0, 2.0, 3.0};
  ForestConfig cfg;
  cfg.min_leaf = 5;
  CHECK_THROWS_AS(fit_qrf(small, y, cfg), std::invalid_argument);
}
