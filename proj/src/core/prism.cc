#include "odcube/core/prism.h"

#include <string>

#include "odcube/core/error.h"

namespace odcube {

std::string_view kind_color(event_kind const k) {
  switch (k) {
    case event_kind::origin: return "blue";
    case event_kind::destination: return "red";
    case event_kind::either: return "green";
  }
  return "green";
}

std::string_view to_string(event_kind const k) {
  switch (k) {
    case event_kind::origin: return "origin";
    case event_kind::destination: return "destination";
    case event_kind::either: return "either";
  }
  return "either";
}

event_kind parse_event_kind(std::string_view const s) {
  if (s == "origin" || s == "pickup") {
    return event_kind::origin;
  }
  if (s == "destination" || s == "dropoff") {
    return event_kind::destination;
  }
  if (s == "either") {
    return event_kind::either;
  }
  throw parse_error{"unknown event kind \"" + std::string{s} + "\""};
}

prism::prism(polygon fp, time_interval const iv)
    : footprint{std::move(fp)}, interval{iv} {
  if (!interval.valid()) {
    throw domain_error{"prism interval invalid"};
  }
}

bool prism::contains(plane_point const p, time_stamp const t) const {
  return interval.contains(t) && point_in_polygon(p, footprint);
}

}  // namespace odcube
