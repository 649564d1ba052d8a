#pragma once

#include <optional>
#include <span>
#include <vector>

#include "odcube/core/prism.h"
#include "odcube/core/recurrence.h"
#include "odcube/engine/result_mask.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

// Inclusive on both ends; an absent bound is unbounded.
struct attribute_constraint {
  attribute attr{attribute::fare};
  std::optional<double> min;
  std::optional<double> max;

  bool satisfied_by(double const v) const {
    return (!min || *min <= v) && (!max || v <= *max);
  }
  void validate() const;  // throws domain_error when min > max

  friend bool operator==(attribute_constraint const&,
                         attribute_constraint const&) = default;
};

// One or two pointer volumes. With both, origin_volume constrains pickups
// and destination_volume dropoffs. A single volume uses its slot's role
// unless single_kind overrides it (e.g. either).
struct brush_spec {
  std::optional<prism> origin_volume;
  std::optional<prism> destination_volume;
  std::optional<event_kind> single_kind;

  void validate() const;  // throws domain_error when both volumes are absent
};

struct eval_options {
  bool use_index{true};
};

result_mask eval_prism(dataset_snapshot const& s, prism const& p, event_kind kind,
                       eval_options opt = {});

// Throws config_error for an unknown pattern zone. An empty pattern zone
// means the dataset zone.
result_mask eval_recurrence(dataset_snapshot const& s,
                            recurrence_pattern const& pattern, event_kind kind);

result_mask eval_attributes(dataset_snapshot const& s,
                            std::span<attribute_constraint const> constraints);

result_mask eval_brush(dataset_snapshot const& s, brush_spec const& brush,
                       eval_options opt = {});

enum class point_status : std::uint8_t {
  filtered_out = 0,
  visible = 1,
  highlighted = 2,
  brushed = 3
};

// 2n statuses: pickups [0, n) then dropoffs [n, 2n).
struct status_vector {
  std::vector<point_status> points;

  std::size_t trip_count() const { return points.size() / 2; }
  point_status pickup(std::size_t const i) const { return points[i]; }
  point_status dropoff(std::size_t const i) const {
    return points[trip_count() + i];
  }
};

// Per trip: filtered_out unless global is set; then brushed > highlighted
// (any query) > visible. Throws domain_error on mask length mismatch.
status_vector classify(dataset_snapshot const& s, result_mask const& global,
                       std::span<result_mask const> query_masks,
                       result_mask const* brush = nullptr);

}  // namespace odcube
