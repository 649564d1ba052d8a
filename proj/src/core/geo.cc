#include "odcube/core/geo.h"

#include <numbers>
#include <sstream>

#include "odcube/core/error.h"

namespace odcube {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

plane_point project(geo_point const p) {
  if (!p.valid()) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "coordinate not projectable: lon=" << p.lon << " lat=" << p.lat;
    throw domain_error{msg.str()};
  }
  auto const lat = p.lat * kDegToRad;
  return {kEarthRadius * p.lon * kDegToRad,
          kEarthRadius * std::log(std::tan(std::numbers::pi / 4.0 + lat / 2.0))};
}

geo_point unproject(plane_point const p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw domain_error{"non-finite plane coordinate"};
  }
  auto const lon = p.x / kEarthRadius / kDegToRad;
  auto const lat =
      (2.0 * std::atan(std::exp(p.y / kEarthRadius)) - std::numbers::pi / 2.0) /
      kDegToRad;
  return {lon, lat};
}

}  // namespace odcube
