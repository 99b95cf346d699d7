/**
 * @file geo.hpp
 * @brief Local metric plane for per-user binning, and great-circle distance.
 *
 * The plane is an equirectangular tangent projection around the mean of a
 * user's coordinates. Both it and the haversine distance use the same
 * spherical radius so that plane and great-circle distances agree locally.
 */
#pragma once

#include <cstddef>
#include <span>

#include "ghost/core.hpp"

namespace ghost {

inline constexpr double kEarthRadiusM = 6'371'000.0;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

struct ProjectedPoint {
  double x = 0.0;  ///< meters east of the origin
  double y = 0.0;  ///< meters north of the origin
  Timestamp time;
  std::size_t source_index = 0;

  Vec2 xy() const { return {x, y}; }
};

class LocalProjection {
 public:
  LocalProjection(double origin_lat, double origin_lon);

  /// Origin at the arithmetic mean of lat and of lon. Throws Error(EmptyInput).
  static LocalProjection around(std::span<const GpsPoint> points);

  double origin_lat() const { return origin_lat_; }
  double origin_lon() const { return origin_lon_; }

  Vec2 forward(double lat, double lon) const;
  ProjectedPoint forward(const GpsPoint& p, std::size_t source_index = 0) const;
  LatLon inverse(double x, double y) const;

 private:
  double origin_lat_;
  double origin_lon_;
  double cos_origin_;
};

double haversine_m(double lat1, double lon1, double lat2, double lon2);

}  // namespace ghost
