#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "odcube/engine/evaluate.h"
#include "odcube/engine/result_mask.h"
#include "odcube/ingest/snapshot.h"

namespace odcube {

// Frame layout, little-endian:
//   header  u64 revision, u32 n, u32 flags                 (16 bytes)
//   points  2n x { f32 x, f32 y, f32 t, u8 status, u8 color } (14 bytes)
// pickups [0, n) then dropoffs [n, 2n). x / y are normalized to the dataset
// bbox, t to the dataset interval, all in [0, 1].
inline constexpr std::size_t kPointBufferHeaderBytes = 16;
inline constexpr std::size_t kPointBytes = 14;
inline constexpr std::uint8_t kNoColor = 255;

enum point_buffer_flag : std::uint32_t {
  kFlagBrushActive = 1U << 0,
  kFlagHasQueries = 1U << 1,
};

struct point_record {
  float x{};
  float y{};
  float t{};
  point_status status{point_status::filtered_out};
  std::uint8_t color{kNoColor};

  friend bool operator==(point_record const&, point_record const&) = default;
};

struct point_buffer {
  std::uint64_t revision{};
  std::uint32_t n{};
  std::uint32_t flags{};
  std::vector<point_record> points;  // 2n

  friend bool operator==(point_buffer const&, point_buffer const&) = default;
};

inline std::size_t point_buffer_size(std::size_t const trips) {
  return kPointBufferHeaderBytes + 2 * trips * kPointBytes;
}

// Per trip: color of the first query (in the given order) whose mask holds
// it, kNoColor when none does.
struct colored_mask {
  result_mask const* mask{nullptr};
  int color{};
};
std::vector<std::uint8_t> trip_colors(std::size_t trip_count,
                                      std::span<colored_mask const> queries);

point_buffer make_point_buffer(dataset_snapshot const& s, status_vector const& status,
                               std::span<std::uint8_t const> colors,
                               std::uint64_t revision, std::uint32_t flags);

std::string encode(point_buffer const& b);
// Throws parse_error on a short, long or inconsistent frame.
point_buffer decode_point_buffer(std::string_view bytes);

}  // namespace odcube
