#include "ghost/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ghost {

namespace {
constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;
}  // namespace

LocalProjection::LocalProjection(double origin_lat, double origin_lon)
    : origin_lat_(origin_lat), origin_lon_(origin_lon), cos_origin_(std::cos(origin_lat * kDegToRad)) {
  if (!valid_latitude(origin_lat) || !valid_longitude(origin_lon))
    throw Error(ErrorKind::CoordinateOutOfRange, "projection origin out of range");
}

LocalProjection LocalProjection::around(std::span<const GpsPoint> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "cannot build a projection from zero points");
  double lat = 0.0;
  double lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const auto n = static_cast<double>(points.size());
  return LocalProjection(lat / n, lon / n);
}

Vec2 LocalProjection::forward(double lat, double lon) const {
  return {kEarthRadiusM * cos_origin_ * (lon - origin_lon_) * kDegToRad,
          kEarthRadiusM * (lat - origin_lat_) * kDegToRad};
}

ProjectedPoint LocalProjection::forward(const GpsPoint& p, std::size_t source_index) const {
  Vec2 v = forward(p.lat, p.lon);
  return {v.x, v.y, p.time, source_index};
}

LatLon LocalProjection::inverse(double x, double y) const {
  return {origin_lat_ + y / kEarthRadiusM * kRadToDeg,
          origin_lon_ + x / (kEarthRadiusM * cos_origin_) * kRadToDeg};
}

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = lat1 * kDegToRad;
  const double phi2 = lat2 * kDegToRad;
  const double dphi = (lat2 - lat1) * kDegToRad;
  const double dlambda = (lon2 - lon1) * kDegToRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

}  // namespace ghost
