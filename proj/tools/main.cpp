#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "precipuq/bench.hpp"
#include "precipuq/dataset_io.hpp"
#include "precipuq/errors.hpp"
#include "precipuq/log.hpp"
#include "precipuq/report_io.hpp"
#include "precipuq/rng.hpp"
#include "precipuq/runconfig.hpp"
#include "precipuq/svg.hpp"

namespace fs = std::filesystem;
using precipuq::log::info;

namespace {

constexpr int kExitParse = 2;
constexpr int kExitNoSamples = 3;
constexpr int kExitNoBenchmark = 4;

struct CommonArgs {
  std::string config_path;
  std::string dataset_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool plots = false;
  std::string synth_name;
  std::size_t synth_n = 0;
};

precipuq::Dataset ingest_dataset(const precipuq::RunConfig& rc,
                                 precipuq::DatasetManifest& manifest) {
  if (!rc.data) throw precipuq::ParseError("config: ingest needs a 'data' block");
  const auto& dp = *rc.data;

  const auto gauges = precipuq::load_gauge_csv(dp.gauges);
  auto field_a = precipuq::load_grid_csv(dp.grid_a, "field_a");
  auto field_b = precipuq::load_grid_csv(dp.grid_b, "field_b");

  if (dp.regrid_b_to_a) {
    field_b = precipuq::regrid_bilinear(field_b, field_a.lat_axis, field_a.lon_axis);
  }
  if (field_a.daily()) field_a = precipuq::aggregate_daily_to_monthly(field_a);
  if (field_b.daily()) field_b = precipuq::aggregate_daily_to_monthly(field_b);

  auto built = precipuq::build_samples(gauges, field_a, field_b);
  manifest = precipuq::DatasetManifest::for_dataset(built.dataset);
  manifest.sources = {{"gauges", dp.gauges}, {"grid_a", dp.grid_a}, {"grid_b", dp.grid_b}};
  manifest.skip_log = std::move(built.skips);
  return std::move(built.dataset);
}

int cmd_ingest(const CommonArgs& args) {
  auto rc = precipuq::RunConfig::from_file(args.config_path);
  if (!args.out_dir.empty()) rc.output_dir = args.out_dir;

  precipuq::DatasetManifest manifest;
  const auto dataset = ingest_dataset(rc, manifest);

  fs::create_directories(rc.output_dir);
  precipuq::write_dataset_jsonl(dataset, fs::path(rc.output_dir) / "dataset.jsonl");
  precipuq::write_manifest(manifest, fs::path(rc.output_dir) / "manifest.json");

  std::cout << "samples: " << precipuq::format_grouped(manifest.n_samples) << " ("
            << precipuq::format_grouped(manifest.n_stations) << " stations), skipped: "
            << precipuq::format_grouped(manifest.skip_log.size()) << '\n';
  std::map<std::string, std::size_t> counts;
  for (const auto& s : manifest.skip_log) ++counts[s.reason];
  for (const auto& [reason, count] : counts) {
    std::cout << "  skip " << reason << ": " << precipuq::format_grouped(count) << '\n';
  }
  return 0;
}

int cmd_synth(const CommonArgs& args) {
  if (args.synth_name.empty() || args.synth_n == 0) {
    throw precipuq::ParseError("synth requires --synth NAME and --n COUNT");
  }
  const auto scenario = precipuq::SyntheticScenario::by_name(args.synth_name, args.synth_n,
                                                             args.seed.value_or(0));
  const auto data = precipuq::generate_synthetic(scenario);

  const std::string out_dir = args.out_dir.empty() ? "out" : args.out_dir;
  fs::create_directories(out_dir);
  precipuq::write_dataset_jsonl(data.dataset, fs::path(out_dir) / "dataset.jsonl");
  auto manifest = precipuq::DatasetManifest::for_dataset(data.dataset);
  manifest.sources = {{"scenario", scenario.name},
                      {"n", std::to_string(scenario.n)},
                      {"seed", std::to_string(scenario.seed)}};
  precipuq::write_manifest(manifest, fs::path(out_dir) / "manifest.json");

  std::cout << "samples: " << precipuq::format_grouped(data.dataset.size()) << " ("
            << precipuq::format_grouped(data.dataset.station_index.size()) << " stations)\n";
  return 0;
}

int cmd_benchmark(const CommonArgs& args) {
  auto rc = precipuq::RunConfig::from_file(args.config_path);
  if (!args.out_dir.empty()) rc.output_dir = args.out_dir;
  if (args.seed) rc.bench.seed = *args.seed;
  if (args.plots) rc.plots = true;
  rc.bench.jobs = args.jobs;

  const bool has_benchmark =
      std::any_of(rc.bench.learners.begin(), rc.bench.learners.end(),
                  [&](const auto& lc) { return lc.kind == rc.bench.benchmark_learner; });
  if (!has_benchmark) {
    std::cerr << "error: benchmark learner '" << rc.bench.benchmark_learner
              << "' missing from config\n";
    return kExitNoBenchmark;
  }

  precipuq::Dataset dataset;
  std::vector<precipuq::SkipEntry> skips;
  if (!args.synth_name.empty()) {
    const auto scenario = precipuq::SyntheticScenario::by_name(
        args.synth_name, args.synth_n == 0 ? 10000 : args.synth_n,
        precipuq::derive_seed(rc.bench.seed, 0xDA7A));
    dataset = precipuq::generate_synthetic(scenario).dataset;
  } else if (!args.dataset_path.empty()) {
    dataset = precipuq::load_dataset_jsonl(args.dataset_path);
    const fs::path manifest_path = fs::path(args.dataset_path).parent_path() / "manifest.json";
    if (fs::exists(manifest_path)) skips = precipuq::load_manifest(manifest_path).skip_log;
  } else if (rc.data) {
    precipuq::DatasetManifest manifest;
    dataset = ingest_dataset(rc, manifest);
    skips = std::move(manifest.skip_log);
  } else {
    throw precipuq::ParseError("benchmark needs --dataset, --synth, or a config data block");
  }

  info("running benchmark on " + std::to_string(dataset.size()) + " samples with jobs=" +
       std::to_string(args.jobs));
  auto report = precipuq::run_benchmark(dataset, rc.bench);
  report.skip_log = std::move(skips);

  fs::create_directories(rc.output_dir);
  precipuq::write_report_files(report, rc.output_dir);

  // Gain importance from leafwise ensembles over the entire dataset; uses the
  // configured leafwise block when present, defaults otherwise.
  precipuq::BoostConfig leafwise_cfg = precipuq::BoostConfig::leafwise_defaults();
  for (const auto& lc : rc.bench.learners) {
    if (lc.kind == "boost_leafwise") leafwise_cfg = lc.boost;
  }
  if (static_cast<std::size_t>(leafwise_cfg.min_data_in_leaf) * 2 <= dataset.size()) {
    const auto ensembles = precipuq::fit_importance_ensembles(
        dataset, leafwise_cfg, rc.bench.levels, precipuq::derive_seed(rc.bench.seed, 0x16A1),
        args.jobs);
    std::vector<std::string> names(dataset.predictor_names.begin(),
                                   dataset.predictor_names.end());
    const auto importance = precipuq::feature_importance(ensembles, rc.bench.levels, names);
    precipuq::write_importance_csv(importance, fs::path(rc.output_dir) / "importance.csv");
    std::ofstream imp_out(fs::path(rc.output_dir) / "importance.json", std::ios::binary);
    imp_out << precipuq::importance_json(importance).dump(2) << '\n';
  } else {
    info("skipping importance: dataset smaller than leafwise min_data_in_leaf");
  }

  const auto report_json = report.to_json();
  if (rc.plots) {
    precipuq::write_report_svgs(report_json, rc.output_dir);
    const fs::path imp_path = fs::path(rc.output_dir) / "importance.json";
    if (fs::exists(imp_path)) {
      std::ifstream in(imp_path);
      nlohmann::ordered_json imp;
      in >> imp;
      precipuq::write_importance_svg(imp, fs::path(rc.output_dir) / "importance_heatmap.svg");
    }
  }

  std::cout << precipuq::render_ranked_skills(report_json);
  return 0;
}

int cmd_report(const CommonArgs& args) {
  const fs::path dir = args.out_dir.empty() ? "out" : args.out_dir;
  const fs::path report_path = dir / "report.json";
  if (!fs::exists(report_path)) {
    throw precipuq::ParseError("missing report file: " + report_path.string());
  }
  std::ifstream in(report_path);
  nlohmann::ordered_json report;
  try {
    in >> report;
  } catch (const nlohmann::json::exception& e) {
    throw precipuq::ParseError(std::string("bad report.json: ") + e.what());
  }

  std::cout << precipuq::render_report_tables(report);

  if (args.plots) {
    precipuq::write_report_svgs(report, dir);
    const fs::path imp_path = dir / "importance.json";
    if (fs::exists(imp_path)) {
      std::ifstream imp_in(imp_path);
      nlohmann::ordered_json imp;
      imp_in >> imp;
      precipuq::write_importance_svg(imp, dir / "importance_heatmap.svg");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge/satellite precipitation merging with quantile-regression "
               "uncertainty benchmarks"};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    auto* config = cmd->add_option("--config", args.config_path, "run configuration JSON");
    if (needs_config) config->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "master seed (overrides config)");
    cmd->add_option("--jobs", args.jobs, "worker threads (results are independent of this)");
    cmd->add_flag("--plots", args.plots, "emit SVG figures");
  };

  auto* ingest = app.add_subcommand("ingest", "build a dataset from gauge and grid CSV files");
  add_common(ingest, true);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  add_common(synth, false);
  synth->add_option("--synth", args.synth_name, "scenario name (hetero, single_signal)");
  synth->add_option("--n", args.synth_n, "sample count");

  auto* benchmark = app.add_subcommand("benchmark", "run the cross-validated benchmark");
  add_common(benchmark, true);
  benchmark->add_option("--dataset", args.dataset_path, "dataset JSONL path");
  benchmark->add_option("--synth", args.synth_name, "synthesize this scenario instead");
  benchmark->add_option("--n", args.synth_n, "synthetic sample count");

  auto* report = app.add_subcommand("report", "render a report directory");
  add_common(report, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return cmd_ingest(args);
    if (synth->parsed()) return cmd_synth(args);
    if (benchmark->parsed()) return cmd_benchmark(args);
    if (report->parsed()) return cmd_report(args);
  } catch (const precipuq::NoSamplesError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoSamples;
  } catch (const precipuq::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
