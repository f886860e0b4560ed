#include "precipuq/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "precipuq/errors.hpp"

namespace precipuq {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_double(const std::string& s, const char* what, std::size_t line) {
  if (s.empty()) return std::nan("");
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad numeric field '") + s + "' for " + what, line);
  }
  return v;
}

int parse_int(const std::string& s, const char* what, std::size_t line) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad integer field '") + s + "' for " + what, line);
  }
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path.string());
  return in;
}

}  // namespace

std::vector<GaugeRecord> load_gauge_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty gauge file: " + path.string(), 1);
  ++lineno;
  if (split_csv_line(line) !=
      std::vector<std::string>{"station_id", "lat", "lon", "elevation_m", "year", "month",
                               "precip_mm"}) {
    throw ParseError("unexpected gauge CSV header", lineno);
  }

  std::vector<GaugeRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 7) throw ParseError("expected 7 fields", lineno);
    if (f[0].empty()) throw ParseError("empty station_id", lineno);

    GaugeRecord rec;
    rec.station_id = f[0];
    const double lat = parse_double(f[1], "lat", lineno);
    const double lon = parse_double(f[2], "lon", lineno);
    if (std::isnan(lat) || std::isnan(lon)) throw ParseError("missing coordinate", lineno);
    try {
      rec.location = GeoPoint(lat, lon);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    }
    rec.elevation_m = parse_double(f[3], "elevation_m", lineno);
    rec.year = parse_int(f[4], "year", lineno);
    rec.month = parse_int(f[5], "month", lineno);
    if (rec.month < 1 || rec.month > 12) throw ParseError("month outside 1..12", lineno);
    rec.precip_mm = parse_double(f[6], "precip_mm", lineno);
    if (!std::isnan(rec.precip_mm) && rec.precip_mm < 0.0) {
      throw ParseError("negative precip_mm", lineno);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

GridField load_grid_csv(const std::filesystem::path& path, const std::string& source_tag) {
  auto in = open_input(path);
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw ParseError("empty grid file: " + path.string(), 1);
  ++lineno;
  const auto header = split_csv_line(line);
  bool has_day = false;
  if (header == std::vector<std::string>{"lat", "lon", "year", "month", "value"}) {
    has_day = false;
  } else if (header == std::vector<std::string>{"lat", "lon", "year", "month", "day", "value"}) {
    has_day = true;
  } else {
    throw ParseError("unexpected grid CSV header", lineno);
  }

  struct Cell {
    double lat, lon;
    TimeKey time;
    double value;
  };
  std::vector<Cell> cells;
  std::set<double> lats, lons;
  std::set<TimeKey> times;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    const std::size_t expect = has_day ? 6 : 5;
    if (f.size() != expect) {
      throw ParseError("expected " + std::to_string(expect) + " fields", lineno);
    }
    Cell c{};
    c.lat = parse_double(f[0], "lat", lineno);
    c.lon = parse_double(f[1], "lon", lineno);
    if (std::isnan(c.lat) || std::isnan(c.lon)) throw ParseError("missing coordinate", lineno);
    c.time.year = parse_int(f[2], "year", lineno);
    c.time.month = parse_int(f[3], "month", lineno);
    if (c.time.month < 1 || c.time.month > 12) throw ParseError("month outside 1..12", lineno);
    if (has_day) {
      c.time.day = parse_int(f[4], "day", lineno);
      if (c.time.day < 1 || c.time.day > days_in_month(c.time.year, c.time.month)) {
        throw ParseError("day outside calendar month", lineno);
      }
    }
    c.value = parse_double(f[has_day ? 5 : 4], "value", lineno);
    cells.push_back(c);
    lats.insert(c.lat);
    lons.insert(c.lon);
    times.insert(c.time);
  }
  if (cells.empty()) throw ParseError("grid file has no data rows: " + path.string(), lineno);

  GridField g;
  g.source_tag = source_tag;
  g.lat_axis.assign(lats.begin(), lats.end());
  g.lon_axis.assign(lons.begin(), lons.end());
  g.time_axis.assign(times.begin(), times.end());
  g.values.assign(g.time_axis.size() * g.n_nodes(), std::nan(""));

  auto axis_index = [](const std::vector<double>& axis, double v) {
    return static_cast<std::size_t>(
        std::lower_bound(axis.begin(), axis.end(), v) - axis.begin());
  };
  for (const auto& c : cells) {
    const std::size_t t = static_cast<std::size_t>(
        std::lower_bound(g.time_axis.begin(), g.time_axis.end(), c.time) - g.time_axis.begin());
    double& slot = g.at(t, axis_index(g.lat_axis, c.lat), axis_index(g.lon_axis, c.lon));
    if (!std::isnan(slot)) {
      throw ParseError("duplicate grid cell at lat=" + std::to_string(c.lat) +
                       " lon=" + std::to_string(c.lon));
    }
    slot = c.value;
  }
  g.validate();
  return g;
}

void write_dataset_jsonl(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  for (const auto& s : ds.samples) {
    ordered_json j;
    j["station_id"] = s.station_id;
    j["year"] = s.year;
    j["month"] = s.month;
    j["target_mm"] = s.target_mm;
    ordered_json preds;
    for (std::size_t k = 0; k < kNumPredictors; ++k) {
      preds[ds.predictor_names[k]] = s.predictors[k];
    }
    j["predictors"] = std::move(preds);
    out << j.dump() << '\n';
  }
}

Dataset load_dataset_jsonl(const std::filesystem::path& path) {
  auto in = open_input(path);
  Dataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool names_set = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad JSON: ") + e.what(), lineno);
    }
    try {
      Sample s;
      s.station_id = j.at("station_id").get<std::string>();
      s.year = j.at("year").get<int>();
      s.month = j.at("month").get<int>();
      s.target_mm = j.at("target_mm").get<double>();
      const auto& preds = j.at("predictors");
      if (preds.size() != kNumPredictors) {
        throw ParseError("expected " + std::to_string(kNumPredictors) + " predictors", lineno);
      }
      std::size_t k = 0;
      for (auto it = preds.begin(); it != preds.end(); ++it, ++k) {
        if (!names_set) {
          ds.predictor_names[k] = it.key();
        } else if (ds.predictor_names[k] != it.key()) {
          throw ParseError("inconsistent predictor name '" + it.key() + "'", lineno);
        }
        s.predictors[k] = it.value().get<double>();
      }
      names_set = true;
      ds.samples.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad sample record: ") + e.what(), lineno);
    }
  }
  if (ds.samples.empty()) throw NoSamplesError("dataset file has no samples: " + path.string());
  ds.rebuild_station_index();
  return ds;
}

DatasetManifest DatasetManifest::for_dataset(const Dataset& ds) {
  DatasetManifest m;
  m.n_samples = ds.samples.size();
  m.n_stations = ds.station_index.size();
  m.predictor_names = ds.predictor_names;
  return m;
}

void write_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  ordered_json j;
  j["version"] = 1;
  j["kind"] = "dataset_manifest";
  j["n_samples"] = m.n_samples;
  j["n_stations"] = m.n_stations;
  j["predictor_names"] = m.predictor_names;
  j["sources"] = m.sources;

  std::map<std::string, std::size_t> counts;
  for (const auto& s : m.skip_log) ++counts[s.reason];
  j["skip_counts"] = counts;

  ordered_json skips = ordered_json::array();
  for (const auto& s : m.skip_log) {
    skips.push_back({{"station_id", s.station_id},
                     {"year", s.year},
                     {"month", s.month},
                     {"reason", s.reason}});
  }
  j["skip_log"] = std::move(skips);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << j.dump(2) << '\n';
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  auto in = open_input(path);
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad manifest JSON: ") + e.what());
  }
  DatasetManifest m;
  m.n_samples = j.at("n_samples").get<std::size_t>();
  m.n_stations = j.at("n_stations").get<std::size_t>();
  const auto names = j.at("predictor_names").get<std::vector<std::string>>();
  if (names.size() != kNumPredictors) throw ParseError("manifest predictor_names size mismatch");
  std::copy(names.begin(), names.end(), m.predictor_names.begin());
  if (j.contains("sources")) {
    m.sources = j.at("sources").get<std::map<std::string, std::string>>();
  }
  if (j.contains("skip_log")) {
    for (const auto& e : j.at("skip_log")) {
      m.skip_log.push_back({e.at("station_id").get<std::string>(), e.at("year").get<int>(),
                            e.at("month").get<int>(), e.at("reason").get<std::string>()});
    }
  }
  return m;
}

}  // namespace precipuq
