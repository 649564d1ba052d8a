#include "odcube/core/civil_time.h"

#include <algorithm>

#include "odcube/core/error.h"
#include "odcube/core/time.h"

namespace odcube {

namespace {

absl::CivilSecond const kCivilEpoch{1970, 1, 1, 0, 0, 0};

}  // namespace

absl::CivilSecond to_civil(std::int64_t const local_seconds) {
  return kCivilEpoch + local_seconds;
}

std::int64_t from_civil_local(absl::CivilSecond const cs) {
  return cs - kCivilEpoch;
}

time_zone time_zone::load(std::string_view const name) {
  absl::TimeZone tz;
  if (name.empty() || !absl::LoadTimeZone(std::string{name}, &tz)) {
    throw config_error{"unknown time zone \"" + std::string{name} + "\""};
  }
  return time_zone{std::string{name}, tz};
}

time_zone time_zone::utc() { return time_zone{"UTC", absl::UTCTimeZone()}; }

std::int64_t time_zone::offset_at(std::int64_t const utc) const {
  return tz_.At(absl::FromUnixSeconds(utc)).offset;
}

std::int64_t time_zone::from_civil(absl::CivilSecond const cs) const {
  return absl::ToUnixSeconds(absl::FromCivil(cs, tz_));
}

std::vector<offset_segment> time_zone::segments(std::int64_t const from,
                                                std::int64_t const to) const {
  std::vector<offset_segment> out;
  auto t = from;
  while (t < to) {
    auto const offset = offset_at(t);
    auto end = to;
    absl::TimeZone::CivilTransition trans;
    if (tz_.NextTransition(absl::FromUnixSeconds(t), &trans)) {
      // trans.from is the civil time just before the switch, on the old clock
      auto const instant = from_civil_local(trans.from) - offset;
      if (instant > t) {
        end = std::min(end, instant);
      }
    }
    if (!out.empty() && out.back().offset == offset) {
      out.back().end = end;
    } else {
      out.push_back({t, end, offset});
    }
    t = end;
  }
  return out;
}

std::vector<std::int64_t> time_zone::boundaries(std::int64_t const from,
                                                std::int64_t const to,
                                                std::int64_t const unit,
                                                std::int64_t const phase) const {
  std::vector<std::int64_t> out;
  for (auto const& seg : segments(from, to)) {
    auto const local_start = seg.start + seg.offset;
    auto local = phase + floor_div(local_start - phase + unit - 1, unit) * unit;
    for (; local - seg.offset < seg.end; local += unit) {
      out.push_back(local - seg.offset);
    }
  }
  return out;
}

std::vector<std::int64_t> time_zone::month_boundaries(std::int64_t const from,
                                                      std::int64_t const to) const {
  std::vector<std::int64_t> out;
  for (auto const& seg : segments(from, to)) {
    auto const local_start = seg.start + seg.offset;
    auto const cs = to_civil(local_start);
    auto month = absl::CivilMonth{cs};
    if (absl::CivilSecond{month} != cs) {
      ++month;
    }
    for (;; ++month) {
      auto const utc = from_civil_local(absl::CivilSecond{month}) - seg.offset;
      if (utc >= seg.end) {
        break;
      }
      out.push_back(utc);
    }
  }
  return out;
}

local_clock::local_clock(time_zone const& zone, std::int64_t const from,
                         std::int64_t const to)
    : zone_{zone}, segments_{zone.segments(from, to)} {}

std::int64_t local_clock::to_local(std::int64_t const utc) const {
  auto const it = std::upper_bound(
      begin(segments_), end(segments_), utc,
      [](std::int64_t const t, offset_segment const& s) { return t < s.end; });
  if (it == end(segments_) || utc < it->start) {
    return zone_.to_local(utc);
  }
  return utc + it->offset;
}

}  // namespace odcube
