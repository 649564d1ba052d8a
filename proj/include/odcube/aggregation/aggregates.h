#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "odcube/aggregation/granularity.h"
#include "odcube/engine/result_mask.h"
#include "odcube/ingest/neighborhoods.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

struct measure {
  enum class kind : std::uint8_t { count, mean } type{kind::count};
  attribute attr{attribute::fare};  // used by mean

  static measure count() { return {}; }
  static measure mean(attribute const a) { return {kind::mean, a}; }
};

// "count", "mean:fare" or "mean(fare)"
measure parse_measure(std::string_view s);
std::string to_string(measure const& m);

struct aggregate_series {
  time_granularity granularity{time_granularity::hour};
  measure what;
  event_kind kind{event_kind::either};
  time_interval span;                        // after clipping
  std::vector<std::int64_t> bucket_starts;   // UTC, local-civil aligned
  std::vector<std::optional<double>> values; // mean of an empty bucket: none
  std::vector<std::string> warnings;
};

// Buckets by the kind's event time; either buckets by pickup so every trip
// counts once. Only events inside `span` (clipped to the dataset interval)
// contribute.
aggregate_series time_series(dataset_snapshot const& s, result_mask const& mask,
                             time_interval span, time_granularity g,
                             measure what, event_kind kind);

struct histogram_result {
  attribute attr{attribute::fare};
  double min{};
  double max{};
  double bin_width{};
  std::vector<std::size_t> counts;  // empty for an empty selection
};

// Equal-width bins over [min, max] of the selected values; the last bin is
// right-inclusive. Throws domain_error for bin_count == 0.
histogram_result histogram(dataset_snapshot const& s, result_mask const& mask,
                           attribute attr, std::size_t bin_count);

struct choropleth_table {
  event_kind kind{event_kind::either};
  std::vector<std::pair<std::string, std::size_t>> counts;  // set order
  std::size_t unassigned{};
};

// Counts selected trips by the region holding their kind-event (pickup for
// either). Each trip lands in the first containing region or "unassigned".
choropleth_table choropleth(dataset_snapshot const& s, result_mask const& mask,
                            neighborhood_set const& regions, event_kind kind);

// Count series for one region at granularity_for(span). Region membership is
// the same first-match rule choropleth() uses. Throws not_found_error.
aggregate_series choropleth_stack(dataset_snapshot const& s,
                                  result_mask const& mask,
                                  neighborhood_set const& regions,
                                  std::string_view name, time_interval span,
                                  event_kind kind);

nlohmann::json to_json(aggregate_series const& a);
nlohmann::json to_json(histogram_result const& h);
nlohmann::json to_json(choropleth_table const& c);

// "bucket_start,bucket_start_utc,value"
std::string to_csv(aggregate_series const& a);
std::string to_csv(histogram_result const& h);
std::string to_csv(choropleth_table const& c);

}  // namespace odcube
