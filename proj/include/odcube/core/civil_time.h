#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/time/civil_time.h"
#include "absl/time/time.h"

namespace odcube {

// [start, end) in UTC seconds with a constant UTC offset.
struct offset_segment {
  std::int64_t start{};
  std::int64_t end{};
  std::int64_t offset{};  // seconds east of UTC
};

// "Local seconds" below means UTC seconds plus the zone offset, i.e. seconds
// since 1970-01-01T00:00 on the local civil clock.
class time_zone {
public:
  // Throws config_error for identifiers not in the zoneinfo database.
  static time_zone load(std::string_view name);
  static time_zone utc();

  std::string const& name() const { return name_; }
  absl::TimeZone const& absl_zone() const { return tz_; }

  std::int64_t offset_at(std::int64_t utc) const;
  std::int64_t to_local(std::int64_t const utc) const {
    return utc + offset_at(utc);
  }
  // Ambiguous / skipped civil times resolve to the pre-transition offset.
  std::int64_t from_civil(absl::CivilSecond cs) const;

  std::vector<offset_segment> segments(std::int64_t from, std::int64_t to) const;

  // UTC instants t in [from, to) with (to_local(t) - phase) % unit == 0,
  // ascending. Repeated local times (DST fall-back) yield two instants,
  // skipped ones none.
  std::vector<std::int64_t> boundaries(std::int64_t from, std::int64_t to,
                                       std::int64_t unit,
                                       std::int64_t phase = 0) const;
  // UTC instants in [from, to) where local time is 00:00 on the 1st.
  std::vector<std::int64_t> month_boundaries(std::int64_t from,
                                             std::int64_t to) const;

  friend bool operator==(time_zone const& a, time_zone const& b) {
    return a.name_ == b.name_;
  }

private:
  time_zone(std::string name, absl::TimeZone tz)
      : name_{std::move(name)}, tz_{tz} {}

  std::string name_;
  absl::TimeZone tz_;
};

// Precomputed offset segments for a UTC range; lookups outside fall back to
// the zone.
class local_clock {
public:
  local_clock(time_zone const& zone, std::int64_t from, std::int64_t to);

  std::int64_t to_local(std::int64_t utc) const;
  time_zone const& zone() const { return zone_; }

private:
  time_zone zone_;
  std::vector<offset_segment> segments_;
};

inline constexpr std::int64_t kSecondsPerDay = 86400;

// Monday = 0 ... Sunday = 6.
inline int local_weekday(std::int64_t const local_seconds) {
  auto const days = local_seconds >= 0
                        ? local_seconds / kSecondsPerDay
                        : -((-local_seconds + kSecondsPerDay - 1) / kSecondsPerDay);
  return static_cast<int>(((days + 3) % 7 + 7) % 7);
}

inline int local_minute_of_day(std::int64_t const local_seconds) {
  auto const s = ((local_seconds % kSecondsPerDay) + kSecondsPerDay) % kSecondsPerDay;
  return static_cast<int>(s / 60);
}

absl::CivilSecond to_civil(std::int64_t local_seconds);
std::int64_t from_civil_local(absl::CivilSecond cs);

}  // namespace odcube
