#include "odcube/core/recurrence.h"

#include <array>

#include "odcube/core/error.h"

namespace odcube {

namespace {

constexpr std::array<std::string_view, 7> kWeekdayNames = {
    "Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

}  // namespace

std::uint8_t weekday_bit(int const weekday) {
  return static_cast<std::uint8_t>(1U << weekday);
}

int parse_weekday(std::string_view const name) {
  for (auto i = 0; i != 7; ++i) {
    if (kWeekdayNames[static_cast<std::size_t>(i)] == name) {
      return i;
    }
  }
  throw parse_error{"unknown weekday \"" + std::string{name} + "\""};
}

std::string_view weekday_name(int const weekday) {
  return kWeekdayNames.at(static_cast<std::size_t>(weekday));
}

bool recurrence_pattern::matches_local(std::int64_t const local_seconds) const {
  if (weekdays != 0 && (weekdays & weekday_bit(local_weekday(local_seconds))) == 0) {
    return false;
  }
  if (hours) {
    auto const m = local_minute_of_day(local_seconds);
    return m >= hours->start && m < hours->end;
  }
  return true;
}

void recurrence_pattern::validate() const {
  if ((weekdays & 0x80U) != 0) {
    throw domain_error{"weekday mask out of range"};
  }
  if (hours && !(hours->start >= 0 && hours->start < hours->end &&
                 hours->end <= 1440)) {
    throw domain_error{"hour range must satisfy 0 <= start < end <= 1440"};
  }
}

time_zone resolve_zone(recurrence_pattern const& pattern,
                       time_zone const& fallback) {
  return pattern.timezone.empty() ? fallback : time_zone::load(pattern.timezone);
}

bool recurrence_matches(recurrence_pattern const& pattern, time_stamp const t) {
  pattern.validate();
  auto const zone = pattern.timezone.empty() ? time_zone::utc()
                                             : time_zone::load(pattern.timezone);
  return pattern.matches_local(zone.to_local(t.epoch_seconds));
}

recurrence_matcher::recurrence_matcher(recurrence_pattern pattern,
                                       time_zone const& zone,
                                       std::int64_t const from,
                                       std::int64_t const to)
    : pattern_{std::move(pattern)}, clock_{zone, from, to} {
  pattern_.validate();
}

}  // namespace odcube
