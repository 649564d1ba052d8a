#include "odcube/core/time.h"

#include <algorithm>
#include <cstdio>

#include "odcube/core/error.h"

namespace odcube {

time_interval time_interval::intersect(time_interval const& o) const {
  auto const s = std::max(start, o.start);
  auto const e = std::min(end, o.end);
  return {s, std::max(s, e)};
}

time_interval make_interval(std::int64_t const start, std::int64_t const end) {
  auto const i = time_interval{{start}, {end}};
  if (!i.valid()) {
    throw domain_error{"invalid time interval [" + std::to_string(start) + ", " +
                       std::to_string(end) + ")"};
  }
  return i;
}

std::string format_utc(time_stamp const t) {
  // civil-from-days, proleptic Gregorian
  auto const days = floor_div(t.epoch_seconds, 86400);
  auto const secs = floor_mod(t.epoch_seconds, 86400);
  auto const z = days + 719468;
  auto const era = floor_div(z, 146097);
  auto const doe = z - era * 146097;
  auto const yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  auto const doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  auto const mp = (5 * doy + 2) / 153;
  auto const d = doy - (153 * mp + 2) / 5 + 1;
  auto const m = mp < 10 ? mp + 3 : mp - 9;
  auto const y = yoe + era * 400 + (m <= 2 ? 1 : 0);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%04lld-%02lld-%02lldT%02lld:%02lld:%02lldZ",
                static_cast<long long>(y), static_cast<long long>(m),
                static_cast<long long>(d), static_cast<long long>(secs / 3600),
                static_cast<long long>(secs / 60 % 60),
                static_cast<long long>(secs % 60));
  return buf;
}

}  // namespace odcube
