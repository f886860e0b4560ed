#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "precipuq/geo.hpp"
#include "precipuq/rng.hpp"
#include "test_util.hpp"

using namespace precipuq;
using testutil::make_monthly_grid;

namespace {

// Independent neighbor oracle: enumerate every node, sort by
// (distance, lat_idx, lon_idx), take k.
std::vector<GridNeighbor> neighbor_oracle(const GeoPoint& p, const GridField& g, std::size_t k) {
  std::vector<GridNeighbor> all;
  for (std::size_t la = 0; la < g.lat_axis.size(); ++la) {
    for (std::size_t lo = 0; lo < g.lon_axis.size(); ++lo) {
      all.push_back({la, lo, haversine_m(p, GeoPoint(g.lat_axis[la], g.lon_axis[lo]))});
    }
  }
  std::sort(all.begin(), all.end(), [](const GridNeighbor& a, const GridNeighbor& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    if (a.lat_idx != b.lat_idx) return a.lat_idx < b.lat_idx;
    return a.lon_idx < b.lon_idx;
  });
  all.resize(k);
  return all;
}

GridField daily_grid_april(double fill) {
  std::vector<TimeKey> days;
  for (int d = 1; d <= 30; ++d) days.push_back({2001, 4, d});
  return make_monthly_grid({0.0, 1.0}, {0.0, 1.0}, days, fill);
}

}  // namespace

TEST_CASE("GeoPoint validates and normalizes") {
  CHECK_THROWS_AS(GeoPoint(91.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GeoPoint(-90.5, 0.0), std::invalid_argument);
  CHECK(GeoPoint(45.0, 180.0).lon() == doctest::Approx(-180.0));
  CHECK(GeoPoint(45.0, 270.0).lon() == doctest::Approx(-90.0));
  CHECK(GeoPoint(45.0, -181.0).lon() == doctest::Approx(179.0));
  CHECK(GeoPoint(0.0, -180.0).lon() == doctest::Approx(-180.0));
}

TEST_CASE("haversine reference arcs") {
  CHECK(haversine_m(GeoPoint(0, 0), GeoPoint(0, 0)) == 0.0);
  // Antipodal arc = pi * R.
  CHECK(haversine_m(GeoPoint(0, 0), GeoPoint(0, 180)) ==
        doctest::Approx(std::numbers::pi * 6371000.0).epsilon(1e-12));
  // One degree of longitude at the equator.
  CHECK(haversine_m(GeoPoint(0, 0), GeoPoint(0, 1)) ==
        doctest::Approx(std::numbers::pi * 6371000.0 / 180.0).epsilon(1e-12));
}

TEST_CASE("haversine is symmetric and nonnegative") {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const GeoPoint a(rng.uniform(-90, 90), rng.uniform(-180, 180));
    const GeoPoint b(rng.uniform(-90, 90), rng.uniform(-180, 180));
    const double dab = haversine_m(a, b);
    const double dba = haversine_m(b, a);
    CHECK(dab >= 0.0);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-12));
  }
}

TEST_CASE("nearest_grid_points finds an exact node first") {
  const auto g = make_monthly_grid({10, 11, 12}, {20, 21, 22}, {{2001, 1, 0}});
  const auto nb = nearest_grid_points(GeoPoint(11, 21), g, 4);
  CHECK(nb[0].lat_idx == 1);
  CHECK(nb[0].lon_idx == 1);
  CHECK(nb[0].distance_m == 0.0);
  for (std::size_t i = 1; i < nb.size(); ++i) CHECK(nb[i].distance_m >= nb[i - 1].distance_m);
}

TEST_CASE("nearest_grid_points breaks exact ties lexicographically") {
  // Cell symmetric about the equator: all four corners are equidistant from
  // the center.
  const auto g = make_monthly_grid({-0.5, 0.5}, {0.0, 1.0}, {{2001, 1, 0}});
  const auto nb = nearest_grid_points(GeoPoint(0.0, 0.5), g, 4);
  CHECK(nb[0].distance_m == doctest::Approx(nb[3].distance_m).epsilon(1e-12));
  CHECK(nb[0].lat_idx == 0);
  CHECK(nb[0].lon_idx == 0);
  CHECK(nb[1].lat_idx == 0);
  CHECK(nb[1].lon_idx == 1);
  CHECK(nb[2].lat_idx == 1);
  CHECK(nb[2].lon_idx == 0);
  CHECK(nb[3].lat_idx == 1);
  CHECK(nb[3].lon_idx == 1);
}

TEST_CASE("nearest_grid_points matches the exhaustive oracle") {
  const auto g3 = make_monthly_grid({40, 40.25, 40.5}, {-100, -99.75, -99.5}, {{2001, 1, 0}});
  const GeoPoint near_corner(40.05, -99.95);
  const auto got = nearest_grid_points(near_corner, g3, 4);
  const auto want = neighbor_oracle(near_corner, g3, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(got[i].lat_idx == want[i].lat_idx);
    CHECK(got[i].lon_idx == want[i].lon_idx);
    CHECK(got[i].distance_m == want[i].distance_m);
  }

  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t nlat = 2 + rng.below(19);
    const std::size_t nlon = 2 + rng.below(19);
    std::vector<double> lats(nlat), lons(nlon);
    double v = rng.uniform(-60, 50);
    for (auto& x : lats) x = (v += rng.uniform(0.05, 0.5));
    v = rng.uniform(-170, 150);
    for (auto& x : lons) x = (v += rng.uniform(0.05, 0.5));
    const auto g = make_monthly_grid(lats, lons, {{2001, 1, 0}});
    const GeoPoint p(rng.uniform(-60, 60), rng.uniform(-170, 170));
    const auto a = nearest_grid_points(p, g, 4);
    const auto b = neighbor_oracle(p, g, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a[i].lat_idx == b[i].lat_idx);
      CHECK(a[i].lon_idx == b[i].lon_idx);
    }
  }
}

TEST_CASE("nearest_grid_points rejects tiny grids") {
  const auto g = make_monthly_grid({0, 1}, {0.0}, {{2001, 1, 0}});
  CHECK_THROWS_WITH_AS(nearest_grid_points(GeoPoint(0, 0), g, 4), "insufficient grid",
                       std::runtime_error);
}

TEST_CASE("regrid_bilinear fixes constants and affine fields") {
  auto g = make_monthly_grid({0, 1, 2}, {0, 1, 2}, {{2001, 1, 0}}, 3.25);
  const auto constant = regrid_bilinear(g, {0.25, 1.5}, {0.4, 1.9});
  for (double v : constant.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));

  // f(lat, lon) = 2 + 3*lon - lat is reproduced exactly inside a cell.
  for (std::size_t la = 0; la < 3; ++la) {
    for (std::size_t lo = 0; lo < 3; ++lo) {
      g.at(0, la, lo) = 2.0 + 3.0 * g.lon_axis[lo] - g.lat_axis[la];
    }
  }
  const auto affine = regrid_bilinear(g, {0.25, 0.75}, {0.5, 0.75});
  for (std::size_t la = 0; la < 2; ++la) {
    for (std::size_t lo = 0; lo < 2; ++lo) {
      const double want = 2.0 + 3.0 * affine.lon_axis[lo] - affine.lat_axis[la];
      CHECK(affine.at(0, la, lo) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("regrid_bilinear cell-center average") {
  auto g = make_monthly_grid({0, 1}, {0, 1}, {{2001, 1, 0}});
  g.at(0, 0, 0) = 0.0;
  g.at(0, 0, 1) = 1.0;
  g.at(0, 1, 0) = 2.0;
  g.at(0, 1, 1) = 3.0;
  const auto out = regrid_bilinear(g, {0.5}, {0.5});
  CHECK(out.at(0, 0, 0) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("regrid_bilinear onto source axes is the identity") {
  Rng rng(11);
  auto g = make_monthly_grid({0, 0.5, 1.25}, {10, 10.5, 11, 11.5}, {{2001, 1, 0}, {2001, 2, 0}});
  for (auto& v : g.values) v = rng.uniform(0, 100);
  g.at(1, 2, 3) = std::nan("");
  const auto out = regrid_bilinear(g, g.lat_axis, g.lon_axis);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    if (std::isnan(g.values[i])) {
      CHECK(std::isnan(out.values[i]));
    } else {
      CHECK(out.values[i] == g.values[i]);  // bit-exact
    }
  }
}

TEST_CASE("regrid_bilinear refuses extrapolation and propagates missing corners") {
  auto g = make_monthly_grid({0, 1}, {0, 1}, {{2001, 1, 0}}, 1.0);
  CHECK_THROWS_WITH_AS(regrid_bilinear(g, {-0.1}, {0.5}), "extrapolation requested",
                       std::runtime_error);
  CHECK_THROWS_AS(regrid_bilinear(g, {0.5}, {1.5}), std::runtime_error);

  g.at(0, 1, 1) = std::nan("");
  const auto interior = regrid_bilinear(g, {0.5}, {0.5});
  CHECK(std::isnan(interior.at(0, 0, 0)));
  // On-node query does not touch the missing far corner.
  const auto on_node = regrid_bilinear(g, {0.0}, {0.0});
  CHECK(on_node.at(0, 0, 0) == 1.0);
}

TEST_CASE("aggregate_daily_to_monthly sums complete months") {
  const auto sum30 = aggregate_daily_to_monthly(daily_grid_april(1.0));
  CHECK(sum30.time_axis.size() == 1);
  CHECK(sum30.time_axis[0] == TimeKey{2001, 4, 0});
  CHECK(sum30.at(0, 0, 0) == doctest::Approx(30.0).epsilon(1e-15));

  auto spike = daily_grid_april(0.0);
  spike.at(1, 0, 0) = 5.0;  // one wet day
  const auto agg = aggregate_daily_to_monthly(spike);
  CHECK(agg.at(0, 0, 0) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("aggregate_daily_to_monthly drops incomplete months") {
  // Missing calendar day: whole month missing everywhere.
  std::vector<TimeKey> days;
  for (int d = 1; d <= 29; ++d) days.push_back({2001, 4, d});
  const auto missing_day = aggregate_daily_to_monthly(make_monthly_grid({0, 1}, {0, 1}, days, 1.0));
  CHECK(std::isnan(missing_day.at(0, 0, 0)));

  // Missing value at one node: that node's month missing, others fine.
  auto g = daily_grid_april(2.0);
  g.at(10, 0, 1) = std::nan("");
  const auto agg = aggregate_daily_to_monthly(g);
  CHECK(agg.at(0, 0, 0) == doctest::Approx(60.0));
  CHECK(std::isnan(agg.at(0, 0, 1)));

  const auto monthly = make_monthly_grid({0, 1}, {0, 1}, {{2001, 1, 0}});
  CHECK_THROWS_AS(aggregate_daily_to_monthly(monthly), std::invalid_argument);
}

TEST_CASE("aggregate and regrid commute on complete data") {
  Rng rng(99);
  std::vector<TimeKey> days;
  for (int d = 1; d <= 28; ++d) days.push_back({2001, 2, d});
  auto g = make_monthly_grid({0, 0.5, 1.0, 1.5}, {5, 5.5, 6.0}, days);
  for (auto& v : g.values) v = rng.uniform(0, 50);

  const std::vector<double> tlat = {0.2, 0.7, 1.3};
  const std::vector<double> tlon = {5.1, 5.9};
  const auto a = aggregate_daily_to_monthly(regrid_bilinear(g, tlat, tlon));
  const auto b = regrid_bilinear(aggregate_daily_to_monthly(g), tlat, tlon);
  REQUIRE(a.values.size() == b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(1e-9));
  }
}

TEST_CASE("days_in_month handles leap years") {
  CHECK(days_in_month(2001, 2) == 28);
  CHECK(days_in_month(2004, 2) == 29);
  CHECK(days_in_month(2000, 2) == 29);
  CHECK(days_in_month(1900, 2) == 28);
  CHECK(days_in_month(2001, 4) == 30);
  CHECK(days_in_month(2001, 12) == 31);
}
