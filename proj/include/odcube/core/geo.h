#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace odcube {

inline constexpr double kEarthRadius = 6378137.0;
inline constexpr double kMaxLatitude = 85.0511;

struct geo_point {
  double lon{};
  double lat{};

  bool valid() const {
    return std::isfinite(lon) && std::isfinite(lat) && lon >= -180.0 &&
           lon <= 180.0 && lat >= -kMaxLatitude && lat <= kMaxLatitude;
  }
  friend bool operator==(geo_point const&, geo_point const&) = default;
};

// Spherical Web Mercator (EPSG:3857), meters.
struct plane_point {
  double x{};
  double y{};

  friend bool operator==(plane_point const&, plane_point const&) = default;
};

struct bbox {
  double min_x{std::numeric_limits<double>::infinity()};
  double min_y{std::numeric_limits<double>::infinity()};
  double max_x{-std::numeric_limits<double>::infinity()};
  double max_y{-std::numeric_limits<double>::infinity()};

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return empty() ? 0.0 : max_x - min_x; }
  double height() const { return empty() ? 0.0 : max_y - min_y; }

  void extend(plane_point const p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  void extend(bbox const& o) {
    if (o.empty()) {
      return;
    }
    extend(plane_point{o.min_x, o.min_y});
    extend(plane_point{o.max_x, o.max_y});
  }
  bool contains(plane_point const p) const {
    return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y;
  }
  bool intersects(bbox const& o) const {
    return !(o.min_x > max_x || o.max_x < min_x || o.min_y > max_y ||
             o.max_y < min_y);
  }
  bbox padded(double const d) const {
    return {min_x - d, min_y - d, max_x + d, max_y + d};
  }
  friend bool operator==(bbox const&, bbox const&) = default;
};

// Throws domain_error for invalid input.
plane_point project(geo_point p);
geo_point unproject(plane_point p);

}  // namespace odcube
