#include "precipuq/runconfig.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "precipuq/errors.hpp"

namespace precipuq {

namespace {

using ordered_json = nlohmann::ordered_json;

void check_keys(const ordered_json& j, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!j.is_object()) throw ParseError("config: expected an object at " + context);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ParseError("config: unknown key '" + it.key() + "' in " + context);
    }
  }
}

LearnerConfig parse_learner(const ordered_json& j) {
  if (!j.contains("kind")) throw ParseError("config: learner block missing 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  LearnerConfig lc = LearnerConfig::by_kind(kind);

  if (kind == "linear_qr") {
    check_keys(j, {"kind", "tolerance", "max_iter_per_stage"}, "learner " + kind);
    if (j.contains("tolerance")) lc.linear.tolerance = j.at("tolerance").get<double>();
    if (j.contains("max_iter_per_stage")) {
      lc.linear.max_iter_per_stage = j.at("max_iter_per_stage").get<int>();
    }
  } else if (kind == "qrf") {
    check_keys(j, {"kind", "n_trees", "mtry", "min_leaf", "bootstrap"}, "learner " + kind);
    if (j.contains("n_trees")) lc.forest.n_trees = j.at("n_trees").get<int>();
    if (j.contains("mtry")) lc.forest.mtry = j.at("mtry").get<int>();
    if (j.contains("min_leaf")) lc.forest.min_leaf = j.at("min_leaf").get<int>();
    if (j.contains("bootstrap")) lc.forest.bootstrap = j.at("bootstrap").get<bool>();
  } else if (kind == "boost_levelwise" || kind == "boost_leafwise") {
    check_keys(j,
               {"kind", "n_iterations", "learning_rate", "max_depth", "max_leaves",
                "min_data_in_leaf", "feature_fraction", "bagging_fraction", "min_split_gain",
                "max_bins"},
               "learner " + kind);
    auto& bc = lc.boost;
    if (j.contains("n_iterations")) bc.n_iterations = j.at("n_iterations").get<int>();
    if (j.contains("learning_rate")) bc.learning_rate = j.at("learning_rate").get<double>();
    if (j.contains("max_depth")) bc.max_depth = j.at("max_depth").get<int>();
    if (j.contains("max_leaves")) bc.max_leaves = j.at("max_leaves").get<int>();
    if (j.contains("min_data_in_leaf")) bc.min_data_in_leaf = j.at("min_data_in_leaf").get<int>();
    if (j.contains("feature_fraction")) bc.feature_fraction = j.at("feature_fraction").get<double>();
    if (j.contains("bagging_fraction")) bc.bagging_fraction = j.at("bagging_fraction").get<double>();
    if (j.contains("min_split_gain")) bc.min_split_gain = j.at("min_split_gain").get<double>();
    if (j.contains("max_bins")) bc.max_bins = j.at("max_bins").get<int>();
    bc.validate();
  } else if (kind == "qrnn") {
    check_keys(j, {"kind", "hidden_width", "n_trials", "max_iter_per_stage"}, "learner " + kind);
    if (j.contains("hidden_width")) lc.qrnn.hidden_width = j.at("hidden_width").get<int>();
    if (j.contains("n_trials")) lc.qrnn.n_trials = j.at("n_trials").get<int>();
    if (j.contains("max_iter_per_stage")) {
      lc.qrnn.max_iter_per_stage = j.at("max_iter_per_stage").get<int>();
    }
  } else if (kind == "oracle") {
    check_keys(j, {"kind", "scenario"}, "learner " + kind);
    if (j.contains("scenario")) lc.oracle_scenario = j.at("scenario").get<std::string>();
    if (!SyntheticScenario::known(lc.oracle_scenario)) {
      throw ParseError("config: unknown oracle scenario '" + lc.oracle_scenario + "'");
    }
  }
  return lc;
}

}  // namespace

RunConfig RunConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: invalid JSON: ") + e.what());
  }

  check_keys(j,
             {"version", "seed", "folds", "levels", "fold_granularity", "benchmark_learner",
              "learners", "data", "output_dir", "plots"},
             "top level");
  if (!j.contains("version")) throw ParseError("config: missing 'version'");
  if (j.at("version").get<int>() != 1) throw ParseError("config: unsupported version");

  RunConfig rc;
  try {
    if (j.contains("seed")) rc.bench.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("folds")) rc.bench.folds = j.at("folds").get<int>();
    if (j.contains("levels")) {
      rc.bench.levels = LevelGrid(j.at("levels").get<std::vector<double>>());
    }
    if (j.contains("fold_granularity")) {
      const auto g = j.at("fold_granularity").get<std::string>();
      if (g == "by_sample") {
        rc.bench.granularity = FoldGranularity::by_sample;
      } else if (g == "by_station") {
        rc.bench.granularity = FoldGranularity::by_station;
      } else {
        throw ParseError("config: fold_granularity must be by_sample or by_station");
      }
    }
    if (j.contains("benchmark_learner")) {
      rc.bench.benchmark_learner = j.at("benchmark_learner").get<std::string>();
    }
    if (j.contains("learners")) {
      for (const auto& lj : j.at("learners")) rc.bench.learners.push_back(parse_learner(lj));
    }
    if (j.contains("data")) {
      const auto& dj = j.at("data");
      check_keys(dj, {"gauges", "grid_a", "grid_b", "regrid_b_to_a"}, "data");
      DataPaths dp;
      dp.gauges = dj.at("gauges").get<std::string>();
      dp.grid_a = dj.at("grid_a").get<std::string>();
      dp.grid_b = dj.at("grid_b").get<std::string>();
      if (dj.contains("regrid_b_to_a")) dp.regrid_b_to_a = dj.at("regrid_b_to_a").get<bool>();
      rc.data = dp;
    }
    if (j.contains("output_dir")) rc.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("plots")) rc.plots = j.at("plots").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  return rc;
}

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace precipuq
