#pragma once

#include <cstdint>
#include <string>

#include "odcube/core/civil_time.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

// NYC-like synthetic trips: hotspot-weighted positions, a diurnal pickup
// rhythm in local time, attributes loosely tied to distance.
struct synth_options {
  std::size_t trips{10000};
  std::uint64_t seed{1};
  std::string timezone{"America/New_York"};
  std::int64_t start{1304222400};  // 2011-05-01 00:00 America/New_York
  int days{7};
};

trip_columns synthesize_trips(synth_options const& opt);

// CSV with canonical header names and local "YYYY-MM-DD hh:mm:ss" times;
// readable with column_map::canonical().
std::string trips_to_csv(trip_columns const& trips, time_zone const& zone);

std::string format_local(std::int64_t utc, time_zone const& zone);

}  // namespace odcube
