#include "odcube/aggregation/granularity.h"

#include <array>
#include <string>

#include "odcube/core/error.h"

namespace odcube {

namespace {

constexpr std::array<std::string_view, kGranularityCount> kNames = {
    "minute", "15min", "hour", "6hour", "day", "week", "month"};

constexpr std::array<std::int64_t, kGranularityCount> kSeconds = {
    60, 900, 3600, 21600, 86400, 604800, 2629746};

constexpr std::size_t kBucketLimit = 5'000'000;

// 1970-01-05 was a Monday.
constexpr std::int64_t kWeekPhase = 4 * kSecondsPerDay;

}  // namespace

std::string_view to_string(time_granularity const g) {
  return kNames[static_cast<std::size_t>(g)];
}

time_granularity parse_granularity(std::string_view const s) {
  for (auto i = std::size_t{0}; i != kGranularityCount; ++i) {
    if (kNames[i] == s) {
      return static_cast<time_granularity>(i);
    }
  }
  if (s == "min15") {
    return time_granularity::min15;
  }
  if (s == "hour6") {
    return time_granularity::hour6;
  }
  throw parse_error{"unknown granularity \"" + std::string{s} + "\""};
}

std::int64_t nominal_seconds(time_granularity const g) {
  return kSeconds[static_cast<std::size_t>(g)];
}

std::size_t nominal_bucket_count(time_interval const span,
                                 time_granularity const g) {
  auto const d = std::max<std::int64_t>(0, span.duration());
  auto const u = nominal_seconds(g);
  return static_cast<std::size_t>((d + u - 1) / u);
}

time_granularity granularity_for(time_interval const span) {
  auto best = time_granularity::minute;
  auto best_distance = std::numeric_limits<std::size_t>::max();
  for (auto i = std::size_t{0}; i != kGranularityCount; ++i) {
    auto const g = static_cast<time_granularity>(i);
    auto const n = nominal_bucket_count(span, g);
    if (n >= kMinBuckets && n <= kMaxBuckets) {
      return g;
    }
    auto const distance = n < kMinBuckets ? kMinBuckets - n : n - kMaxBuckets;
    if (distance < best_distance) {
      best = g;
      best_distance = distance;
    }
  }
  return best;
}

std::vector<std::int64_t> bucket_starts(time_zone const& zone,
                                        time_interval const span,
                                        time_granularity const g) {
  if (span.empty()) {
    throw domain_error{"bucket span is empty"};
  }
  if (nominal_bucket_count(span, g) > kBucketLimit) {
    throw domain_error{"too many buckets at granularity " +
                       std::string{to_string(g)}};
  }
  // Look back far enough to find the boundary at or before span.start,
  // allowing for a DST shift.
  auto const lookback = nominal_seconds(g) + (g == time_granularity::month
                                                  ? 4 * kSecondsPerDay
                                                  : 2 * 3600);
  auto const from = span.start.epoch_seconds - lookback;
  auto const to = span.end.epoch_seconds;
  std::vector<std::int64_t> all;
  switch (g) {
    case time_granularity::month: all = zone.month_boundaries(from, to); break;
    case time_granularity::week:
      all = zone.boundaries(from, to, 7 * kSecondsPerDay, kWeekPhase);
      break;
    default: all = zone.boundaries(from, to, nominal_seconds(g)); break;
  }
  auto const first = std::upper_bound(begin(all), end(all), span.start.epoch_seconds);
  if (first == begin(all)) {
    throw domain_error{"no bucket boundary before span start"};
  }
  return {first - 1, end(all)};
}

}  // namespace odcube
