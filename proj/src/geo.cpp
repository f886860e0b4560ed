#include "precipuq/geo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace precipuq {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

// Index of the cell [axis[i], axis[i+1]] containing t; t == back() maps to
// the last cell. Caller guarantees t is inside the hull.
std::size_t cell_index(const std::vector<double>& axis, double t) {
  auto it = std::upper_bound(axis.begin(), axis.end(), t);
  std::size_t i = static_cast<std::size_t>(it - axis.begin());
  if (i > 0) --i;
  if (i + 1 >= axis.size()) i = axis.size() - 2;
  return i;
}

}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
    throw std::invalid_argument("GeoPoint: non-finite coordinate");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    throw std::invalid_argument("GeoPoint: latitude outside [-90, 90]");
  }
  lon_ = std::fmod(lon_deg + 180.0, 360.0);
  if (lon_ < 0.0) lon_ += 360.0;
  lon_ -= 180.0;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dphi = (b.lat() - a.lat()) * kDegToRad;
  const double dlam = (b.lon() - a.lon()) * kDegToRad;

  const double sp = std::sin(dphi / 2.0);
  const double sl = std::sin(dlam / 2.0);
  const double h = sp * sp + std::cos(phi1) * std::cos(phi2) * sl * sl;
  return 2.0 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

int days_in_month(int year, int month) {
  static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (month < 1 || month > 12) throw std::invalid_argument("days_in_month: month outside 1..12");
  const bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) return 29;
  return kDays[month - 1];
}

bool GridField::daily() const {
  return !time_axis.empty() &&
         std::all_of(time_axis.begin(), time_axis.end(), [](const TimeKey& t) { return t.day >= 1; });
}

bool GridField::monthly() const {
  return !time_axis.empty() &&
         std::all_of(time_axis.begin(), time_axis.end(), [](const TimeKey& t) { return t.day == 0; });
}

std::optional<std::size_t> GridField::month_index(int year, int month) const {
  const TimeKey key{year, month, 0};
  auto it = std::lower_bound(time_axis.begin(), time_axis.end(), key);
  if (it == time_axis.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - time_axis.begin());
}

void GridField::validate() const {
  if (lat_axis.empty() || lon_axis.empty()) {
    throw std::invalid_argument("GridField: empty axis");
  }
  if (!strictly_increasing(lat_axis) || !strictly_increasing(lon_axis)) {
    throw std::invalid_argument("GridField: axes must be strictly increasing");
  }
  if (!std::is_sorted(time_axis.begin(), time_axis.end()) ||
      std::adjacent_find(time_axis.begin(), time_axis.end()) != time_axis.end()) {
    throw std::invalid_argument("GridField: time axis must be sorted and unique");
  }
  if (values.size() != time_axis.size() * n_nodes()) {
    throw std::invalid_argument("GridField: value count does not match axes");
  }
}

std::vector<GridNeighbor> nearest_grid_points(const GeoPoint& p, const GridField& g,
                                              std::size_t k) {
  if (g.n_nodes() < k) throw std::runtime_error("insufficient grid");

  std::vector<GridNeighbor> all;
  all.reserve(g.n_nodes());
  for (std::size_t la = 0; la < g.lat_axis.size(); ++la) {
    for (std::size_t lo = 0; lo < g.lon_axis.size(); ++lo) {
      const GeoPoint node(g.lat_axis[la], g.lon_axis[lo]);
      all.push_back({la, lo, haversine_m(p, node)});
    }
  }
  auto closer = [](const GridNeighbor& a, const GridNeighbor& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    if (a.lat_idx != b.lat_idx) return a.lat_idx < b.lat_idx;
    return a.lon_idx < b.lon_idx;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
  all.resize(k);
  return all;
}

GridField regrid_bilinear(const GridField& g, const std::vector<double>& target_lat_axis,
                          const std::vector<double>& target_lon_axis) {
  g.validate();
  if (target_lat_axis.empty() || target_lon_axis.empty() ||
      !strictly_increasing(target_lat_axis) || !strictly_increasing(target_lon_axis)) {
    throw std::invalid_argument("regrid_bilinear: target axes must be strictly increasing");
  }
  if (target_lat_axis.front() < g.lat_axis.front() || target_lat_axis.back() > g.lat_axis.back() ||
      target_lon_axis.front() < g.lon_axis.front() || target_lon_axis.back() > g.lon_axis.back()) {
    throw std::runtime_error("extrapolation requested");
  }

  struct AxisPos {
    std::size_t i;
    double w;  // weight of the upper node, in [0, 1]
  };
  auto locate = [](const std::vector<double>& axis, double t) {
    const std::size_t i = cell_index(axis, t);
    const double w = (t - axis[i]) / (axis[i + 1] - axis[i]);
    return AxisPos{i, w};
  };

  std::vector<AxisPos> lat_pos, lon_pos;
  lat_pos.reserve(target_lat_axis.size());
  lon_pos.reserve(target_lon_axis.size());
  for (double t : target_lat_axis) lat_pos.push_back(locate(g.lat_axis, t));
  for (double t : target_lon_axis) lon_pos.push_back(locate(g.lon_axis, t));

  GridField out;
  out.source_tag = g.source_tag;
  out.lat_axis = target_lat_axis;
  out.lon_axis = target_lon_axis;
  out.time_axis = g.time_axis;
  out.values.assign(g.time_axis.size() * target_lat_axis.size() * target_lon_axis.size(), 0.0);

  for (std::size_t t = 0; t < g.time_axis.size(); ++t) {
    for (std::size_t la = 0; la < target_lat_axis.size(); ++la) {
      const auto [iy, wy] = lat_pos[la];
      for (std::size_t lo = 0; lo < target_lon_axis.size(); ++lo) {
        const auto [ix, wx] = lon_pos[lo];
        // Zero-weight corners are skipped, so on-node queries reproduce the
        // source value exactly and a missing far corner cannot poison them.
        double acc = 0.0;
        bool missing = false;
        const double cw[2] = {1.0 - wy, wy};
        const double cx[2] = {1.0 - wx, wx};
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < 2; ++dx) {
            const double w = cw[dy] * cx[dx];
            if (w == 0.0) continue;
            const double v = g.at(t, iy + dy, ix + dx);
            if (std::isnan(v)) {
              missing = true;
            } else {
              acc += w * v;
            }
          }
        }
        out.at(t, la, lo) = missing ? std::nan("") : acc;
      }
    }
  }
  return out;
}

GridField aggregate_daily_to_monthly(const GridField& g) {
  g.validate();
  if (!g.daily()) throw std::invalid_argument("aggregate_daily_to_monthly: daily time axis required");

  // Group slice indices by calendar month; axis order keeps this sorted.
  std::map<std::pair<int, int>, std::vector<std::size_t>> by_month;
  for (std::size_t t = 0; t < g.time_axis.size(); ++t) {
    by_month[{g.time_axis[t].year, g.time_axis[t].month}].push_back(t);
  }

  GridField out;
  out.source_tag = g.source_tag;
  out.lat_axis = g.lat_axis;
  out.lon_axis = g.lon_axis;
  out.time_axis.reserve(by_month.size());
  for (const auto& [ym, _] : by_month) out.time_axis.push_back({ym.first, ym.second, 0});
  out.values.assign(by_month.size() * g.n_nodes(), std::nan(""));

  std::size_t m = 0;
  for (const auto& [ym, slices] : by_month) {
    const bool complete =
        static_cast<int>(slices.size()) == days_in_month(ym.first, ym.second);
    if (complete) {
      for (std::size_t la = 0; la < g.lat_axis.size(); ++la) {
        for (std::size_t lo = 0; lo < g.lon_axis.size(); ++lo) {
          double sum = 0.0;
          for (std::size_t t : slices) sum += g.at(t, la, lo);  // NaN propagates
          out.at(m, la, lo) = sum;
        }
      }
    }
    ++m;
  }
  return out;
}

}  // namespace precipuq
