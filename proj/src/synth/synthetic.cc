#include "odcube/synth/synthetic.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "odcube/core/format.h"

namespace odcube {

namespace {

struct hotspot {
  double lon, lat, spread, weight;
};

constexpr std::array<hotspot, 9> kHotspots = {{
    {-73.9855, 40.7580, 0.012, 0.26},  // Midtown
    {-74.0090, 40.7075, 0.008, 0.14},  // Lower Manhattan
    {-73.9595, 40.7736, 0.010, 0.12},  // Upper East Side
    {-73.9754, 40.7870, 0.010, 0.10},  // Upper West Side
    {-73.9903, 40.6928, 0.010, 0.08},  // Downtown Brooklyn
    {-73.7781, 40.6413, 0.006, 0.05},  // JFK
    {-73.8740, 40.7769, 0.004, 0.05},  // LaGuardia
    {-73.9772, 40.7527, 0.003, 0.06},  // Grand Central
    {-73.9442, 40.6782, 0.030, 0.14},  // Brooklyn spread
}};

// relative pickup intensity per local hour
constexpr std::array<double, 24> kHourWeights = {
    0.55, 0.40, 0.30, 0.22, 0.18, 0.22, 0.40, 0.70, 0.90, 0.85, 0.80, 0.82,
    0.88, 0.86, 0.88, 0.92, 0.95, 1.00, 1.05, 1.00, 0.95, 0.90, 0.80, 0.70};

class rng_t {
public:
  explicit rng_t(std::uint64_t const seed) : engine_{seed} {}
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal() {
    // Box-Muller
    auto const u1 = std::max(unit(), 1e-300);
    auto const u2 = unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }
  template <std::size_t N>
  std::size_t pick(std::array<double, N> const& w) {
    auto total = 0.0;
    for (auto const v : w) {
      total += v;
    }
    auto r = unit() * total;
    for (auto i = std::size_t{0}; i != N; ++i) {
      r -= w[i];
      if (r < 0.0) {
        return i;
      }
    }
    return N - 1;
  }

private:
  std::mt19937_64 engine_;
};

geo_point draw_position(rng_t& rng) {
  std::array<double, kHotspots.size()> w{};
  for (auto i = std::size_t{0}; i != kHotspots.size(); ++i) {
    w[i] = kHotspots[i].weight;
  }
  auto const& h = kHotspots[rng.pick(w)];
  auto const lon = std::clamp(h.lon + h.spread * rng.normal(), -74.25, -73.70);
  auto const lat = std::clamp(h.lat + h.spread * rng.normal(), 40.50, 40.90);
  return {lon, lat};
}

}  // namespace

trip_columns synthesize_trips(synth_options const& opt) {
  auto const zone = time_zone::load(opt.timezone);
  rng_t rng{opt.seed};
  trip_columns out;
  out.reserve(opt.trips);
  auto const local_start = zone.to_local(opt.start);
  for (auto i = std::size_t{0}; i != opt.trips; ++i) {
    auto const day = static_cast<std::int64_t>(rng.unit() * opt.days);
    auto const hour = static_cast<std::int64_t>(rng.pick(kHourWeights));
    auto const sec = static_cast<std::int64_t>(rng.unit() * 3600.0);
    auto const local = local_start + day * kSecondsPerDay + hour * 3600 + sec;
    auto const pickup_t = zone.from_civil(to_civil(local));

    auto const a = draw_position(rng);
    auto const b = draw_position(rng);
    auto const pa = project(a);
    auto const pb = project(b);
    // Mercator meters shrink by cos(lat); ~1609 m per mile
    auto const meters = std::hypot(pa.x - pb.x, pa.y - pb.y) *
                        std::cos(a.lat * 3.14159265358979323846 / 180.0);
    auto const miles = std::round(std::max(0.1, meters / 1609.344 * 1.3) * 100.0) / 100.0;
    auto const mph = 8.0 + 10.0 * rng.unit();
    auto const duration = std::round(miles / mph * 3600.0 + 60.0 + 240.0 * rng.unit());
    auto const fare = std::round((2.5 + 2.5 * miles + 0.4 * duration / 60.0) * 2.0) / 2.0;
    auto const passengers = static_cast<double>(1 + rng.pick(std::array<double, 6>{
                                                        0.70, 0.14, 0.05, 0.03, 0.05, 0.03}));
    out.push_back({{pickup_t},
                   {pickup_t + static_cast<std::int64_t>(duration)},
                   pa,
                   pb,
                   duration,
                   miles,
                   fare,
                   passengers});
  }
  return out;
}

std::string format_local(std::int64_t const utc, time_zone const& zone) {
  auto const cs = to_civil(zone.to_local(utc));
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d",
                static_cast<int>(cs.year()), cs.month(), cs.day(), cs.hour(),
                cs.minute(), cs.second());
  return buf;
}

std::string trips_to_csv(trip_columns const& trips, time_zone const& zone) {
  std::string out =
      "pickup_time,dropoff_time,pickup_lon,pickup_lat,dropoff_lon,dropoff_lat,"
      "distance,fare,passengers,duration_s\n";
  out.reserve(trips.size() * 140);
  char buf[256];
  for (auto i = std::size_t{0}; i != trips.size(); ++i) {
    auto const r = trips.row(i);
    auto const a = unproject(r.pickup);
    auto const b = unproject(r.dropoff);
    std::snprintf(buf, sizeof(buf), "%s,%s,%.9f,%.9f,%.9f,%.9f,",
                  format_local(r.pickup_time.epoch_seconds, zone).c_str(),
                  format_local(r.dropoff_time.epoch_seconds, zone).c_str(), a.lon,
                  a.lat, b.lon, b.lat);
    out += buf;
    out += format_number(r.distance) + "," + format_number(r.fare) + "," +
           format_number(r.passengers) + "," + format_number(r.duration_s) + "\n";
  }
  return out;
}

}  // namespace odcube
