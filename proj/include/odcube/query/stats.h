#pragma once

#include <array>
#include <optional>

#include "odcube/engine/result_mask.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

struct attribute_summary {
  double mean{};
  double min{};
  double max{};
  friend bool operator==(attribute_summary, attribute_summary) = default;
};

struct trip_stats {
  std::size_t count{};
  // indexed by attribute; empty when count == 0
  std::array<std::optional<attribute_summary>, 4> attributes;

  std::optional<attribute_summary> const& of(attribute const a) const {
    return attributes[static_cast<std::size_t>(a)];
  }
  friend bool operator==(trip_stats const&, trip_stats const&) = default;
};

// One pass in trip order. The mean is the sequential sum divided by the
// count, clamped into [min, max].
trip_stats compute_stats(dataset_snapshot const& s, result_mask const& mask);

}  // namespace odcube
