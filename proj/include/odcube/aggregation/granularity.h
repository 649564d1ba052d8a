#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "odcube/core/civil_time.h"
#include "odcube/core/time.h"

namespace odcube {

enum class time_granularity : std::uint8_t {
  minute,
  min15,
  hour,
  hour6,
  day,
  week,
  month
};

inline constexpr std::size_t kGranularityCount = 7;
inline constexpr std::size_t kMinBuckets = 50;
inline constexpr std::size_t kMaxBuckets = 600;

std::string_view to_string(time_granularity g);
time_granularity parse_granularity(std::string_view s);  // parse_error

// Nominal length; Month uses the mean Gregorian month.
std::int64_t nominal_seconds(time_granularity g);
std::size_t nominal_bucket_count(time_interval span, time_granularity g);

// Finest granularity whose nominal bucket count over `span` lies in
// [kMinBuckets, kMaxBuckets]; when none does, the one whose count is closest
// to that band (ties go to the finer one).
time_granularity granularity_for(time_interval span);

// Bucket starts in UTC aligned to local civil boundaries of `zone`: the first
// is the last boundary <= span.start, the rest are every boundary inside the
// span. Throws domain_error for an empty span or more than 5M buckets.
std::vector<std::int64_t> bucket_starts(time_zone const& zone,
                                        time_interval span, time_granularity g);

}  // namespace odcube
