#pragma once

#include <span>
#include <vector>

#include "odcube/core/geo.h"

namespace odcube {

// Single exterior ring, implicitly closed. Containment uses the even-odd
// rule, so winding order and self-intersections do not matter.
class polygon {
public:
  // Throws domain_error for < 3 distinct vertices or non-finite coordinates.
  // A trailing vertex equal to the first one is dropped.
  explicit polygon(std::vector<plane_point> ring);

  static polygon rectangle(bbox const& b);

  std::span<plane_point const> ring() const { return ring_; }
  bbox const& bounds() const { return bounds_; }

  bool contains(plane_point p) const;

  polygon translated(double dx, double dy) const;
  polygon scaled(double factor) const;  // about the bbox center

  friend bool operator==(polygon const& a, polygon const& b) {
    return a.ring_ == b.ring_;
  }

private:
  std::vector<plane_point> ring_;
  bbox bounds_;
};

// Even-odd crossing test. An edge only counts as crossed when the point lies
// strictly on its left side (for upward edges) or right side (downward), so a
// point exactly on an edge gets no crossing from that edge. Points on the top
// edge of a horizontal band are never inside, points on the bottom are.
bool point_in_polygon(plane_point p, polygon const& poly);

}  // namespace odcube
