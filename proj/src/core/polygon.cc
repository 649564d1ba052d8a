#include "odcube/core/polygon.h"

#include <algorithm>
#include <cmath>

#include "odcube/core/error.h"

namespace odcube {

polygon::polygon(std::vector<plane_point> ring) : ring_{std::move(ring)} {
  if (ring_.size() > 1 && ring_.front() == ring_.back()) {
    ring_.pop_back();
  }
  for (auto const& p : ring_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw domain_error{"polygon vertex is not finite"};
    }
    bounds_.extend(p);
  }
  auto distinct = ring_;
  std::sort(begin(distinct), end(distinct), [](auto const& a, auto const& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  distinct.erase(std::unique(begin(distinct), end(distinct)), end(distinct));
  if (distinct.size() < 3) {
    throw domain_error{"polygon needs at least 3 distinct vertices"};
  }
}

polygon polygon::rectangle(bbox const& b) {
  return polygon{{{b.min_x, b.min_y},
                  {b.max_x, b.min_y},
                  {b.max_x, b.max_y},
                  {b.min_x, b.max_y}}};
}

bool polygon::contains(plane_point const p) const {
  return point_in_polygon(p, *this);
}

polygon polygon::translated(double const dx, double const dy) const {
  auto moved = ring_;
  for (auto& p : moved) {
    p.x += dx;
    p.y += dy;
  }
  return polygon{std::move(moved)};
}

polygon polygon::scaled(double const factor) const {
  auto const cx = (bounds_.min_x + bounds_.max_x) / 2.0;
  auto const cy = (bounds_.min_y + bounds_.max_y) / 2.0;
  auto moved = ring_;
  for (auto& p : moved) {
    p.x = cx + (p.x - cx) * factor;
    p.y = cy + (p.y - cy) * factor;
  }
  return polygon{std::move(moved)};
}

bool point_in_polygon(plane_point const p, polygon const& poly) {
  if (!poly.bounds().contains(p)) {
    return false;
  }
  auto const ring = poly.ring();
  auto inside = false;
  for (auto i = std::size_t{0}, j = ring.size() - 1; i < ring.size(); j = i++) {
    auto const& a = ring[j];
    auto const& b = ring[i];
    if ((a.y > p.y) == (b.y > p.y)) {
      continue;
    }
    // sign of (x_intersection - p.x) * (b.y - a.y)
    auto const cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (b.y > a.y ? cross > 0.0 : cross < 0.0) {
      inside = !inside;
    }
  }
  return inside;
}

}  // namespace odcube
