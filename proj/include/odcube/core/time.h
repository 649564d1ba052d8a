#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace odcube {

// Integer seconds since the Unix epoch, UTC.
struct time_stamp {
  static constexpr std::int64_t kMin = 0;  // 1970-01-01
  static constexpr std::int64_t kMax = 4102444800;  // 2100-01-01, exclusive

  std::int64_t epoch_seconds{};

  bool valid() const { return epoch_seconds >= kMin && epoch_seconds < kMax; }
  friend auto operator<=>(time_stamp, time_stamp) = default;
};

// Half-open [start, end).
struct time_interval {
  time_stamp start;
  time_stamp end;

  bool valid() const {
    return start.valid() && end.epoch_seconds >= time_stamp::kMin &&
           end.epoch_seconds <= time_stamp::kMax && start <= end;
  }
  bool empty() const { return end <= start; }
  std::int64_t duration() const { return end.epoch_seconds - start.epoch_seconds; }
  bool contains(time_stamp const t) const { return start <= t && t < end; }
  bool contains(std::int64_t const t) const {
    return start.epoch_seconds <= t && t < end.epoch_seconds;
  }
  bool contains(time_interval const& o) const {
    return start <= o.start && o.end <= end;
  }
  time_interval intersect(time_interval const& o) const;
  friend bool operator==(time_interval const&, time_interval const&) = default;
};

// Throws domain_error unless start <= end and both are in range.
time_interval make_interval(std::int64_t start, std::int64_t end);

inline std::int64_t floor_div(std::int64_t const a, std::int64_t const b) {
  auto const q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

inline std::int64_t floor_mod(std::int64_t const a, std::int64_t const b) {
  return a - floor_div(a, b) * b;
}

// "YYYY-MM-DDThh:mm:ssZ"
std::string format_utc(time_stamp t);

}  // namespace odcube
