#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precipuq/geo.hpp"
#include "precipuq/numeric.hpp"

namespace precipuq {

// The regression problem is fixed-width: elevation, 4+4 neighbor distances,
// 4+4 neighbor precipitation values.
constexpr std::size_t kNumPredictors = 17;

using PredictorNames = std::array<std::string, kNumPredictors>;

// Names for samples assembled from gauge + two gridded sources, in predictor
// order: elevation, distances (field a then b), values (field a then b).
const PredictorNames& geodata_predictor_names();

// One monthly gauge observation. precip_mm is NaN when the measurement is
// missing; negative values are rejected at parse/build time.
struct GaugeRecord {
  std::string station_id;
  GeoPoint location{0.0, 0.0};
  double elevation_m = 0.0;
  int year = 0;
  int month = 0;
  double precip_mm = 0.0;
};

// One (gauge, month) regression sample.
struct Sample {
  std::string station_id;
  int year = 0;
  int month = 0;
  double target_mm = 0.0;
  std::array<double, kNumPredictors> predictors{};
};

struct Dataset {
  std::vector<Sample> samples;
  PredictorNames predictor_names;
  // station_id -> indices into samples, covering every sample exactly once.
  std::map<std::string, std::vector<std::size_t>> station_index;

  void rebuild_station_index();
  void validate() const;

  std::size_t size() const { return samples.size(); }
};

// Feature matrix (n x 17) and target vector views of a dataset.
Matrix features_matrix(const Dataset& ds);
std::vector<double> targets(const Dataset& ds);

// Row-subset extraction used by the cross-validation harness.
Matrix features_matrix(const Dataset& ds, std::span<const std::size_t> rows);
std::vector<double> targets(const Dataset& ds, std::span<const std::size_t> rows);

struct SkipEntry {
  std::string station_id;
  int year = 0;
  int month = 0;
  std::string reason;
};

struct BuildResult {
  Dataset dataset;
  std::vector<SkipEntry> skips;
};

// Assemble samples from gauge records and two monthly fields. Neighbor
// distances are computed once per station; a (station, month) yields a sample
// only when the target and all eight neighbor values are present, everything
// else lands in the skip log. Throws NoSamplesError when nothing survives.
BuildResult build_samples(const std::vector<GaugeRecord>& gauges, const GridField& field_a,
                          const GridField& field_b);

}  // namespace precipuq
