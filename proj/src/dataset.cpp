#include "precipuq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "precipuq/errors.hpp"
#include "precipuq/log.hpp"

namespace precipuq {

const PredictorNames& geodata_predictor_names() {
  static const PredictorNames names = {
      "elevation_m",
      "dist_a1", "dist_a2", "dist_a3", "dist_a4",
      "dist_b1", "dist_b2", "dist_b3", "dist_b4",
      "precip_a1", "precip_a2", "precip_a3", "precip_a4",
      "precip_b1", "precip_b2", "precip_b3", "precip_b4",
  };
  return names;
}

void Dataset::rebuild_station_index() {
  station_index.clear();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    station_index[samples[i].station_id].push_back(i);
  }
}

void Dataset::validate() const {
  std::size_t covered = 0;
  std::vector<char> seen(samples.size(), 0);
  for (const auto& [station, indices] : station_index) {
    for (std::size_t i : indices) {
      if (i >= samples.size() || samples[i].station_id != station || seen[i]) {
        throw std::invalid_argument("Dataset: station_index does not partition samples");
      }
      seen[i] = 1;
      ++covered;
    }
  }
  if (covered != samples.size()) {
    throw std::invalid_argument("Dataset: station_index does not cover all samples");
  }
}

Matrix features_matrix(const Dataset& ds) {
  Matrix x(ds.samples.size(), kNumPredictors);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    for (std::size_t j = 0; j < kNumPredictors; ++j) x(i, j) = ds.samples[i].predictors[j];
  }
  return x;
}

std::vector<double> targets(const Dataset& ds) {
  std::vector<double> y(ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) y[i] = ds.samples[i].target_mm;
  return y;
}

Matrix features_matrix(const Dataset& ds, std::span<const std::size_t> rows) {
  Matrix x(rows.size(), kNumPredictors);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& s = ds.samples[rows[r]];
    for (std::size_t j = 0; j < kNumPredictors; ++j) x(r, j) = s.predictors[j];
  }
  return x;
}

std::vector<double> targets(const Dataset& ds, std::span<const std::size_t> rows) {
  std::vector<double> y(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) y[r] = ds.samples[rows[r]].target_mm;
  return y;
}

namespace {

struct StationInfo {
  GeoPoint location{0.0, 0.0};
  double elevation_m = 0.0;
  std::vector<GridNeighbor> neighbors_a;
  std::vector<GridNeighbor> neighbors_b;
};

}  // namespace

BuildResult build_samples(const std::vector<GaugeRecord>& gauges, const GridField& field_a,
                          const GridField& field_b) {
  field_a.validate();
  field_b.validate();
  if (!field_a.monthly() || !field_b.monthly()) {
    throw std::invalid_argument("build_samples: both fields must carry monthly time axes");
  }

  // First-appearance station order; records within a station sorted by time.
  std::vector<std::string> station_order;
  std::map<std::string, StationInfo> stations;
  std::map<std::string, std::vector<const GaugeRecord*>> records;
  std::set<std::tuple<std::string, int, int>> seen_keys;

  for (const auto& rec : gauges) {
    if (rec.month < 1 || rec.month > 12) {
      throw std::invalid_argument("build_samples: month outside 1..12 for station " + rec.station_id);
    }
    if (!std::isnan(rec.precip_mm) && rec.precip_mm < 0.0) {
      throw std::invalid_argument("build_samples: negative precipitation for station " + rec.station_id);
    }
    if (std::isnan(rec.elevation_m)) {
      throw std::invalid_argument("build_samples: gauge missing elevation: " + rec.station_id);
    }
    if (!seen_keys.insert({rec.station_id, rec.year, rec.month}).second) {
      throw std::invalid_argument("build_samples: duplicate (station, year, month): " + rec.station_id);
    }
    auto [it, inserted] = stations.try_emplace(rec.station_id);
    if (inserted) {
      station_order.push_back(rec.station_id);
      it->second.location = rec.location;
      it->second.elevation_m = rec.elevation_m;
    } else if (it->second.elevation_m != rec.elevation_m ||
               it->second.location.lat() != rec.location.lat() ||
               it->second.location.lon() != rec.location.lon()) {
      throw std::invalid_argument("build_samples: inconsistent station metadata: " + rec.station_id);
    }
    records[rec.station_id].push_back(&rec);
  }

  for (const auto& id : station_order) {
    auto& info = stations[id];
    info.neighbors_a = nearest_grid_points(info.location, field_a, 4);
    info.neighbors_b = nearest_grid_points(info.location, field_b, 4);
    auto& recs = records[id];
    std::sort(recs.begin(), recs.end(), [](const GaugeRecord* a, const GaugeRecord* b) {
      return std::pair{a->year, a->month} < std::pair{b->year, b->month};
    });
  }

  BuildResult out;
  out.dataset.predictor_names = geodata_predictor_names();

  for (const auto& id : station_order) {
    const auto& info = stations[id];
    for (const GaugeRecord* rec : records[id]) {
      auto skip = [&](const char* reason) {
        out.skips.push_back({id, rec->year, rec->month, reason});
      };
      if (std::isnan(rec->precip_mm)) {
        skip("target_missing");
        continue;
      }
      const auto ta = field_a.month_index(rec->year, rec->month);
      if (!ta) {
        skip("field_a_month_absent");
        continue;
      }
      const auto tb = field_b.month_index(rec->year, rec->month);
      if (!tb) {
        skip("field_b_month_absent");
        continue;
      }
      std::array<double, 4> vals_a{}, vals_b{};
      bool missing = false;
      for (int n = 0; n < 4; ++n) {
        vals_a[n] = field_a.at(*ta, info.neighbors_a[n].lat_idx, info.neighbors_a[n].lon_idx);
        if (std::isnan(vals_a[n])) missing = true;
      }
      if (missing) {
        skip("field_a_value_missing");
        continue;
      }
      for (int n = 0; n < 4; ++n) {
        vals_b[n] = field_b.at(*tb, info.neighbors_b[n].lat_idx, info.neighbors_b[n].lon_idx);
        if (std::isnan(vals_b[n])) missing = true;
      }
      if (missing) {
        skip("field_b_value_missing");
        continue;
      }

      Sample s;
      s.station_id = id;
      s.year = rec->year;
      s.month = rec->month;
      s.target_mm = rec->precip_mm;
      s.predictors[0] = info.elevation_m;
      for (int n = 0; n < 4; ++n) {
        s.predictors[1 + n] = info.neighbors_a[n].distance_m;
        s.predictors[5 + n] = info.neighbors_b[n].distance_m;
        s.predictors[9 + n] = vals_a[n];
        s.predictors[13 + n] = vals_b[n];
      }
      out.dataset.samples.push_back(std::move(s));
    }
  }

  if (out.dataset.samples.empty()) {
    throw NoSamplesError("build_samples: zero samples after skips (" +
                         std::to_string(out.skips.size()) + " skipped)");
  }
  out.dataset.rebuild_station_index();
  log::info("built " + std::to_string(out.dataset.samples.size()) + " samples, skipped " +
            std::to_string(out.skips.size()));
  return out;
}

}  // namespace precipuq
