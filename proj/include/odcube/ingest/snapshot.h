#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odcube/core/civil_time.h"
#include "odcube/core/geo.h"
#include "odcube/core/prism.h"
#include "odcube/core/time.h"
#include "odcube/ingest/grid_index.h"

namespace odcube {

enum class attribute : std::uint8_t { duration_s, distance, fare, passengers };

inline constexpr std::array<attribute, 4> kAllAttributes = {
    attribute::duration_s, attribute::distance, attribute::fare,
    attribute::passengers};

std::string_view to_string(attribute a);
attribute parse_attribute(std::string_view s);  // throws parse_error

enum class endpoint : std::uint8_t { pickup, dropoff };

struct trip_record {
  time_stamp pickup_time;
  time_stamp dropoff_time;
  plane_point pickup;
  plane_point dropoff;
  double duration_s{};
  double distance{};
  double fare{};
  double passengers{};
};

// Parallel columns, one entry per trip.
struct trip_columns {
  std::vector<std::int64_t> pickup_time;
  std::vector<std::int64_t> dropoff_time;
  std::vector<double> pickup_x, pickup_y;
  std::vector<double> dropoff_x, dropoff_y;
  std::vector<double> duration_s, distance, fare, passengers;

  std::size_t size() const { return pickup_time.size(); }
  void reserve(std::size_t n);
  void push_back(trip_record const& r);
  trip_record row(std::size_t i) const;
  bool consistent() const;  // all columns of equal length
};

// Immutable columnar trip store with per-endpoint grid indexes.
class dataset_snapshot {
public:
  // grid_target_cells == 0 picks a default from the trip count.
  // Throws empty_dataset_error for zero trips, domain_error for ragged
  // columns or invalid rows, config_error for an unknown zone.
  dataset_snapshot(trip_columns columns, std::string const& timezone,
                   std::size_t grid_target_cells = 0);

  std::size_t size() const { return columns_.size(); }
  trip_columns const& columns() const { return columns_; }
  trip_record trip(std::size_t const i) const { return columns_.row(i); }

  std::span<double const> attribute_column(attribute a) const;
  std::span<std::int64_t const> times(endpoint e) const;
  std::span<double const> xs(endpoint e) const;
  std::span<double const> ys(endpoint e) const;
  plane_point position(endpoint const e, std::size_t const i) const {
    return {xs(e)[i], ys(e)[i]};
  }
  grid_index const& index(endpoint const e) const {
    return e == endpoint::pickup ? pickup_index_ : dropoff_index_;
  }

  // [min pickup_time, max dropoff_time + 1s)
  time_interval interval() const { return interval_; }
  bbox const& bounds() const { return bounds_; }
  time_zone const& zone() const { return zone_; }
  std::size_t grid_target_cells() const { return grid_target_; }

  // Footprint covering every position, padded so edge points are strictly
  // inside.
  polygon full_footprint() const;
  prism full_prism() const;

private:
  trip_columns columns_;
  time_zone zone_;
  time_interval interval_;
  bbox bounds_;
  std::size_t grid_target_;
  grid_index pickup_index_;
  grid_index dropoff_index_;
};

using snapshot_ptr = std::shared_ptr<dataset_snapshot const>;

std::size_t default_grid_cells(std::size_t trip_count);

// Stand-alone index over one endpoint of a snapshot.
grid_index build_grid_index(dataset_snapshot const& snapshot, endpoint e,
                            std::size_t target_cell_count);

// Uniform sample without replacement (selection sampling, order preserving).
// Throws domain_error unless 0 < k <= n.
dataset_snapshot sample(dataset_snapshot const& snapshot, std::size_t k,
                        std::uint64_t seed);

}  // namespace odcube
