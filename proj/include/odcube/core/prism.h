#pragma once

#include <cstdint>
#include <string_view>

#include "odcube/core/polygon.h"
#include "odcube/core/time.h"

namespace odcube {

enum class event_kind : std::uint8_t { origin, destination, either };

// origin -> blue, destination -> red, either -> green
std::string_view kind_color(event_kind k);
std::string_view to_string(event_kind k);
event_kind parse_event_kind(std::string_view s);  // throws parse_error

// Extruded polygon: footprint swept over a time interval.
struct prism {
  prism(polygon footprint, time_interval interval);

  bool contains(plane_point p, time_stamp t) const;
  bool contains(plane_point const p, std::int64_t const t) const {
    return contains(p, time_stamp{t});
  }

  polygon footprint;
  time_interval interval;

  friend bool operator==(prism const&, prism const&) = default;
};

inline bool prism_contains(prism const& pr, plane_point const p,
                           time_stamp const t) {
  return pr.contains(p, t);
}

}  // namespace odcube
