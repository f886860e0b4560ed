#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "precipuq/dataset.hpp"

namespace precipuq {

// Gauge CSV: header `station_id,lat,lon,elevation_m,year,month,precip_mm`,
// UTF-8, `.` decimal, empty field = missing. Throws ParseError with the
// offending 1-based line number.
std::vector<GaugeRecord> load_gauge_csv(const std::filesystem::path& path);

// Grid CSV (long form): header `lat,lon,year,month[,day],value`; the optional
// day column makes the field daily. Absent (node, time) combinations are
// missing.
GridField load_grid_csv(const std::filesystem::path& path, const std::string& source_tag);

// Dataset persistence: JSON-lines with one sample per line, predictors as a
// named object in canonical order, plus a sidecar manifest.
void write_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path);
Dataset load_dataset_jsonl(const std::filesystem::path& path);

struct DatasetManifest {
  std::size_t n_samples = 0;
  std::size_t n_stations = 0;
  PredictorNames predictor_names;
  std::map<std::string, std::string> sources;
  std::vector<SkipEntry> skip_log;

  static DatasetManifest for_dataset(const Dataset& ds);
};

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

}  // namespace precipuq
