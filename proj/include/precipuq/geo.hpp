#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace precipuq {

constexpr double kEarthRadiusM = 6'371'000.0;

// Geographic coordinate. Latitude in [-90, 90]; longitude normalized into
// [-180, 180) on construction.
class GeoPoint {
 public:
  GeoPoint(double lat_deg, double lon_deg);

  double lat() const { return lat_; }
  double lon() const { return lon_; }

 private:
  double lat_;
  double lon_;
};

// Great-circle distance on a sphere of radius 6,371,000 m.
double haversine_m(const GeoPoint& a, const GeoPoint& b);

// Time coordinate of a grid slice. day == 0 marks a monthly slice.
struct TimeKey {
  int year = 0;
  int month = 0;
  int day = 0;

  auto operator<=>(const TimeKey&) const = default;
};

int days_in_month(int year, int month);

// Gridded field of one satellite source: values indexed [time][lat][lon],
// NaN marking missing cells. Axes are strictly increasing degrees.
struct GridField {
  std::string source_tag;
  std::vector<double> lat_axis;
  std::vector<double> lon_axis;
  std::vector<TimeKey> time_axis;   // sorted, unique
  std::vector<double> values;

  double at(std::size_t t, std::size_t lat_idx, std::size_t lon_idx) const {
    return values[(t * lat_axis.size() + lat_idx) * lon_axis.size() + lon_idx];
  }
  double& at(std::size_t t, std::size_t lat_idx, std::size_t lon_idx) {
    return values[(t * lat_axis.size() + lat_idx) * lon_axis.size() + lon_idx];
  }

  std::size_t n_nodes() const { return lat_axis.size() * lon_axis.size(); }
  bool daily() const;
  bool monthly() const;

  // Index of the monthly slice (year, month), if present.
  std::optional<std::size_t> month_index(int year, int month) const;

  // Throws std::invalid_argument if axes/values are inconsistent.
  void validate() const;
};

struct GridNeighbor {
  std::size_t lat_idx = 0;
  std::size_t lon_idx = 0;
  double distance_m = 0.0;
};

// The k grid nodes closest to p, ascending by distance, ties broken by
// (lat_idx, lon_idx). Throws std::runtime_error("insufficient grid") when the
// grid has fewer than k nodes.
std::vector<GridNeighbor> nearest_grid_points(const GeoPoint& p, const GridField& g,
                                              std::size_t k = 4);

// Bilinear regrid of every time slice onto the target axes. Target nodes must
// lie inside the source hull; corners with zero weight are ignored, so
// regridding onto the source axes reproduces it exactly. Any missing corner
// with positive weight makes the target node missing.
GridField regrid_bilinear(const GridField& g, const std::vector<double>& target_lat_axis,
                          const std::vector<double>& target_lon_axis);

// Sum daily slices into calendar months. A month missing any calendar day, or
// with any missing daily value at a node, is missing at that node.
GridField aggregate_daily_to_monthly(const GridField& g);

}  // namespace precipuq
