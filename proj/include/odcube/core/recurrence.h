#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "odcube/core/civil_time.h"
#include "odcube/core/time.h"

namespace odcube {

// [start, end) minutes of the local day, 0 <= start < end <= 1440.
struct minute_range {
  int start{};
  int end{};
  friend bool operator==(minute_range, minute_range) = default;
};

// Periodic civil-time selection ("every Monday", "daily 10-11AM").
struct recurrence_pattern {
  std::uint8_t weekdays{0};  // bit d set = weekday d (Monday = 0); 0 = all
  std::optional<minute_range> hours;
  std::string timezone;  // IANA id; empty = the dataset's zone

  bool matches_everything() const { return weekdays == 0 && !hours; }
  bool matches_local(std::int64_t local_seconds) const;
  void validate() const;  // throws domain_error

  friend bool operator==(recurrence_pattern const&,
                         recurrence_pattern const&) = default;
};

std::uint8_t weekday_bit(int weekday);
int parse_weekday(std::string_view name);  // "Mon".."Sun", throws parse_error
std::string_view weekday_name(int weekday);

// Throws config_error for an unknown zone.
bool recurrence_matches(recurrence_pattern const& pattern, time_stamp t);

// Pattern bound to a resolved zone; fast path for bulk evaluation.
class recurrence_matcher {
public:
  recurrence_matcher(recurrence_pattern pattern, time_zone const& zone,
                     std::int64_t from, std::int64_t to);

  bool operator()(std::int64_t const utc) const {
    return pattern_.matches_local(clock_.to_local(utc));
  }

private:
  recurrence_pattern pattern_;
  local_clock clock_;
};

// The zone the pattern runs in: its own, or the fallback when unset.
time_zone resolve_zone(recurrence_pattern const& pattern,
                       time_zone const& fallback);

}  // namespace odcube
