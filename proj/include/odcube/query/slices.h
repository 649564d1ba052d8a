#pragma once

#include <span>
#include <string>
#include <vector>

#include "odcube/core/civil_time.h"
#include "odcube/core/recurrence.h"
#include "odcube/core/time.h"
#include "odcube/ingest/snapshot.h"
#include "odcube/query/query_spec.h"

namespace odcube {

// Maximal sub-intervals of `interval` during which every pattern matches;
// disjoint and ascending. Pattern zones default to `zone`.
std::vector<time_interval> slice_interval(
    time_interval interval, std::span<recurrence_pattern const> patterns,
    time_zone const& zone);

struct prism_slices {
  std::string role;  // "prism", "origin", or "member:<id>"
  time_interval interval;
  std::vector<time_interval> slices;
};

// Slices per prism the recurrence acts on: the atomic prism, the origin
// prism of a directional query, or each member of a merged query. Without a
// recurrence every prism has one slice equal to its interval.
std::vector<prism_slices> query_slices(dataset_snapshot const& s,
                                       query_spec const& q);

}  // namespace odcube
