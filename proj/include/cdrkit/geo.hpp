#ifndef CDRKIT_GEO_HPP
#define CDRKIT_GEO_HPP

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cdrkit {

inline constexpr double kEarthRadiusMeters = 6371000.0;  // mean Earth radius

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Great-circle distance in meters between two (lat, lon) points in degrees.
inline double haversine_m(double lat_a, double lon_a, double lat_b, double lon_b) {
  const double pa = deg2rad(lat_a);
  const double pb = deg2rad(lat_b);
  const double sp = std::sin((pb - pa) / 2.0);
  const double sl = std::sin(deg2rad(lon_b - lon_a) / 2.0);
  const double under = sp * sp + std::cos(pa) * std::cos(pb) * sl * sl;
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(under)));
}

}  // namespace cdrkit

#endif  // CDRKIT_GEO_HPP
