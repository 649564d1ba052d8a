#include "odcube/ingest/snapshot.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "odcube/core/error.h"

namespace odcube {

std::string_view to_string(attribute const a) {
  switch (a) {
    case attribute::duration_s: return "duration_s";
    case attribute::distance: return "distance";
    case attribute::fare: return "fare";
    case attribute::passengers: return "passengers";
  }
  return "fare";
}

attribute parse_attribute(std::string_view const s) {
  for (auto const a : kAllAttributes) {
    if (to_string(a) == s) {
      return a;
    }
  }
  if (s == "duration") {
    return attribute::duration_s;
  }
  throw parse_error{"unknown attribute \"" + std::string{s} + "\""};
}

void trip_columns::reserve(std::size_t const n) {
  pickup_time.reserve(n);
  dropoff_time.reserve(n);
  pickup_x.reserve(n);
  pickup_y.reserve(n);
  dropoff_x.reserve(n);
  dropoff_y.reserve(n);
  duration_s.reserve(n);
  distance.reserve(n);
  fare.reserve(n);
  passengers.reserve(n);
}

void trip_columns::push_back(trip_record const& r) {
  pickup_time.push_back(r.pickup_time.epoch_seconds);
  dropoff_time.push_back(r.dropoff_time.epoch_seconds);
  pickup_x.push_back(r.pickup.x);
  pickup_y.push_back(r.pickup.y);
  dropoff_x.push_back(r.dropoff.x);
  dropoff_y.push_back(r.dropoff.y);
  duration_s.push_back(r.duration_s);
  distance.push_back(r.distance);
  fare.push_back(r.fare);
  passengers.push_back(r.passengers);
}

trip_record trip_columns::row(std::size_t const i) const {
  return {{pickup_time[i]},     {dropoff_time[i]},   {pickup_x[i], pickup_y[i]},
          {dropoff_x[i], dropoff_y[i]}, duration_s[i], distance[i],
          fare[i],              passengers[i]};
}

bool trip_columns::consistent() const {
  auto const n = size();
  return dropoff_time.size() == n && pickup_x.size() == n &&
         pickup_y.size() == n && dropoff_x.size() == n &&
         dropoff_y.size() == n && duration_s.size() == n &&
         distance.size() == n && fare.size() == n && passengers.size() == n;
}

std::size_t default_grid_cells(std::size_t const trip_count) {
  return std::clamp<std::size_t>(trip_count / 8, 1, std::size_t{1} << 20);
}

dataset_snapshot::dataset_snapshot(trip_columns columns,
                                   std::string const& timezone,
                                   std::size_t const grid_target_cells)
    : columns_{std::move(columns)},
      zone_{time_zone::load(timezone)},
      grid_target_{grid_target_cells == 0 ? default_grid_cells(columns_.size())
                                          : grid_target_cells} {
  if (!columns_.consistent()) {
    throw domain_error{"trip columns have different lengths"};
  }
  auto const n = columns_.size();
  if (n == 0) {
    throw empty_dataset_error{"dataset has no trips"};
  }
  if (n > std::size_t{0xFFFFFFFFU}) {
    throw domain_error{"too many trips for 32-bit trip ids"};
  }
  auto min_t = columns_.pickup_time[0];
  auto max_t = columns_.dropoff_time[0];
  for (auto i = std::size_t{0}; i != n; ++i) {
    auto const r = columns_.row(i);
    if (!r.pickup_time.valid() || !r.dropoff_time.valid() ||
        r.dropoff_time < r.pickup_time) {
      throw domain_error{"trip " + std::to_string(i) + " has invalid times"};
    }
    for (auto const p : {r.pickup, r.dropoff}) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        throw domain_error{"trip " + std::to_string(i) + " has invalid position"};
      }
      bounds_.extend(p);
    }
    min_t = std::min(min_t, r.pickup_time.epoch_seconds);
    max_t = std::max(max_t, r.dropoff_time.epoch_seconds);
  }
  interval_ = time_interval{{min_t}, {max_t + 1}};
  pickup_index_ = grid_index{bounds_, grid_target_, columns_.pickup_x,
                             columns_.pickup_y};
  dropoff_index_ = grid_index{bounds_, grid_target_, columns_.dropoff_x,
                              columns_.dropoff_y};
}

std::span<double const> dataset_snapshot::attribute_column(
    attribute const a) const {
  switch (a) {
    case attribute::duration_s: return columns_.duration_s;
    case attribute::distance: return columns_.distance;
    case attribute::fare: return columns_.fare;
    case attribute::passengers: return columns_.passengers;
  }
  return columns_.fare;
}

std::span<std::int64_t const> dataset_snapshot::times(endpoint const e) const {
  return e == endpoint::pickup ? columns_.pickup_time : columns_.dropoff_time;
}

std::span<double const> dataset_snapshot::xs(endpoint const e) const {
  return e == endpoint::pickup ? columns_.pickup_x : columns_.dropoff_x;
}

std::span<double const> dataset_snapshot::ys(endpoint const e) const {
  return e == endpoint::pickup ? columns_.pickup_y : columns_.dropoff_y;
}

polygon dataset_snapshot::full_footprint() const {
  auto const pad = std::max(1.0, 1e-6 * std::max(bounds_.width(), bounds_.height()));
  return polygon::rectangle(bounds_.padded(pad));
}

prism dataset_snapshot::full_prism() const {
  return prism{full_footprint(), interval_};
}

grid_index build_grid_index(dataset_snapshot const& snapshot, endpoint const e,
                            std::size_t const target_cell_count) {
  return grid_index{snapshot.bounds(), target_cell_count, snapshot.xs(e),
                    snapshot.ys(e)};
}

dataset_snapshot sample(dataset_snapshot const& snapshot, std::size_t const k,
                        std::uint64_t const seed) {
  auto const n = snapshot.size();
  if (k == 0 || k > n) {
    throw domain_error{"sample size " + std::to_string(k) + " outside (0, " +
                       std::to_string(n) + "]"};
  }
  // Knuth's algorithm S; raw engine output keeps it identical across
  // standard library implementations.
  std::mt19937_64 rng{seed};
  auto const unit = [&] {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  trip_columns out;
  out.reserve(k);
  auto selected = std::size_t{0};
  for (auto i = std::size_t{0}; i != n && selected != k; ++i) {
    auto const remaining = static_cast<double>(n - i);
    if (remaining * unit() < static_cast<double>(k - selected)) {
      out.push_back(snapshot.trip(i));
      ++selected;
    }
  }
  return dataset_snapshot{std::move(out), snapshot.zone().name(),
                          snapshot.grid_target_cells() * k / n};
}

}  // namespace odcube
