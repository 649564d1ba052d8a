#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "odcube/ingest/snapshot.h"

namespace odcube {

struct geo_bounds {
  double min_lon{}, min_lat{}, max_lon{}, max_lat{};
  bool contains(geo_point const p) const {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat &&
           p.lat <= max_lat;
  }
};

inline constexpr geo_bounds kNewYorkBounds{-74.30, 40.45, -73.65, 40.95};

// Canonical field -> CSV header name. Canonical fields: pickup_time,
// dropoff_time, pickup_lon, pickup_lat, dropoff_lon, dropoff_lat, distance,
// fare, passengers, and optionally duration_s (derived from the two times
// when unmapped).
struct column_map {
  std::map<std::string, std::string> fields;
  std::string time_format{"%Y-%m-%d %H:%M:%S"};  // or "epoch"
  std::string timezone{"America/New_York"};
  char delimiter{','};
  std::optional<geo_bounds> city_bounds{kNewYorkBounds};

  // Identity mapping (header names equal canonical names); duration_s is
  // left unmapped and so derived.
  static column_map canonical();
  // Throws schema_error / parse_error.
  static column_map from_json(nlohmann::json const& j);
  nlohmann::json to_json() const;
};

std::vector<std::string> const& canonical_fields();

enum class reject_policy { drop, fail };

struct rejected_row {
  std::size_t row{};  // 1-based data row (header excluded)
  std::string reason;
};

struct ingest_report {
  std::size_t accepted{};
  std::size_t rejected{};
  std::vector<rejected_row> reasons;

  nlohmann::json to_json() const;
};

struct ingest_result {
  snapshot_ptr snapshot;
  ingest_report report;
};

// Throws schema_error for missing columns, empty_dataset_error when nothing
// is accepted, parse_error for the first bad row under reject_policy::fail.
ingest_result load_trips(std::filesystem::path const& path, column_map const& map,
                         reject_policy policy = reject_policy::drop,
                         std::size_t grid_target_cells = 0);
ingest_result load_trips_from_string(std::string_view csv, column_map const& map,
                                     reject_policy policy = reject_policy::drop,
                                     std::size_t grid_target_cells = 0);

// Same as above, without building a snapshot (the report explains every
// rejection, the columns hold the accepted rows).
struct parsed_trips {
  trip_columns columns;
  ingest_report report;
};
parsed_trips parse_trips(std::string_view csv, column_map const& map,
                         reject_policy policy);

// RFC 4180 style split of one record; quotes may wrap delimiters.
std::vector<std::string_view> split_csv_line(std::string_view line, char delim,
                                             std::string& scratch);

}  // namespace odcube
