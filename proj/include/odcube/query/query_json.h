#pragma once

#include <cstdint>

#include "json.hpp"

#include "odcube/engine/evaluate.h"
#include "odcube/ingest/neighborhoods.h"
#include "odcube/query/query_manager.h"

namespace odcube {

// What JSON fragments may refer to: dataset defaults and named regions.
struct json_context {
  dataset_snapshot const* snapshot{nullptr};
  neighborhood_set const* neighborhoods{nullptr};
};

// Epoch seconds, or "YYYY-MM-DD hh:mm:ss" in the dataset zone ("...Z" = UTC).
std::int64_t time_from_json(nlohmann::json const& j, time_zone const& zone);
nlohmann::json interval_to_json(time_interval const& iv);

// {"polygon": [[x, y], ...]} Web Mercator, or "polygon_lonlat", or
// "neighborhood": name; "interval": [start, end]. Missing footprint = full
// extent, missing interval = dataset interval. Throws schema_error /
// parse_error / domain_error / not_found_error.
prism prism_from_json(nlohmann::json const& j, json_context const& ctx);
nlohmann::json prism_to_json(prism const& p);

// {"weekdays": ["Mon", ...], "hour_range": [start_min, end_min] or
//  "hours": ["18:00", "24:00"], "timezone": "America/New_York"}
recurrence_pattern recurrence_from_json(nlohmann::json const& j);
nlohmann::json recurrence_to_json(recurrence_pattern const& r);

query_spec query_spec_from_json(nlohmann::json const& j, json_context const& ctx);
nlohmann::json query_spec_to_json(query_spec const& q);

attribute_constraint constraint_from_json(nlohmann::json const& j);
nlohmann::json constraint_to_json(attribute_constraint const& c);

// {"origin": prism?, "destination": prism?, "kind": "either"?}
brush_spec brush_from_json(nlohmann::json const& j, json_context const& ctx);

nlohmann::json stats_to_json(trip_stats const& s);
nlohmann::json slices_to_json(std::vector<prism_slices> const& slices);
// Spec + count + stats + slices of a live query.
nlohmann::json result_to_json(query_manager const& m, query_id id);

}  // namespace odcube
