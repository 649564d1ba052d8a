#include "odcube/service/point_buffer.h"

#include <bit>
#include <cstring>

#include "odcube/core/error.h"

namespace odcube {

namespace {

static_assert(std::endian::native == std::endian::little,
              "point buffer encoding assumes a little-endian host");

template <typename T>
void put(std::string& out, T const v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view const bytes, std::size_t const offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

float normalize(double const v, double const lo, double const hi) {
  auto const w = hi - lo;
  return w > 0.0 ? static_cast<float>((v - lo) / w) : 0.0F;
}

}  // namespace

std::vector<std::uint8_t> trip_colors(std::size_t const trip_count,
                                      std::span<colored_mask const> queries) {
  std::vector<std::uint8_t> colors(trip_count, kNoColor);
  result_mask assigned{trip_count};
  for (auto const& q : queries) {
    if (q.mask == nullptr) {
      continue;
    }
    if (q.mask->size() != trip_count) {
      throw domain_error{"trip_colors: mask length mismatch"};
    }
    auto const c = static_cast<std::uint8_t>(q.color);
    q.mask->for_each_set([&](std::size_t const i) {
      if (!assigned.test(i)) {
        assigned.set(i);
        colors[i] = c;
      }
    });
  }
  return colors;
}

point_buffer make_point_buffer(dataset_snapshot const& s, status_vector const& status,
                               std::span<std::uint8_t const> colors,
                               std::uint64_t const revision,
                               std::uint32_t const flags) {
  auto const n = s.size();
  if (status.points.size() != 2 * n || colors.size() != n) {
    throw domain_error{"make_point_buffer: size mismatch"};
  }
  point_buffer b;
  b.revision = revision;
  b.n = static_cast<std::uint32_t>(n);
  b.flags = flags;
  b.points.resize(2 * n);
  auto const& box = s.bounds();
  auto const iv = s.interval();
  auto const t0 = static_cast<double>(iv.start.epoch_seconds);
  auto const t1 = static_cast<double>(iv.end.epoch_seconds);
  for (auto const e : {endpoint::pickup, endpoint::dropoff}) {
    auto const base = e == endpoint::pickup ? std::size_t{0} : n;
    auto const xs = s.xs(e);
    auto const ys = s.ys(e);
    auto const ts = s.times(e);
    for (auto i = std::size_t{0}; i != n; ++i) {
      auto& p = b.points[base + i];
      p.x = normalize(xs[i], box.min_x, box.max_x);
      p.y = normalize(ys[i], box.min_y, box.max_y);
      p.t = normalize(static_cast<double>(ts[i]), t0, t1);
      p.status = status.points[base + i];
      p.color = colors[i];
    }
  }
  return b;
}

std::string encode(point_buffer const& b) {
  if (b.points.size() != 2 * static_cast<std::size_t>(b.n)) {
    throw domain_error{"point buffer: expected 2n points"};
  }
  std::string out;
  out.reserve(point_buffer_size(b.n));
  put(out, b.revision);
  put(out, b.n);
  put(out, b.flags);
  for (auto const& p : b.points) {
    put(out, p.x);
    put(out, p.y);
    put(out, p.t);
    put(out, static_cast<std::uint8_t>(p.status));
    put(out, p.color);
  }
  return out;
}

point_buffer decode_point_buffer(std::string_view const bytes) {
  if (bytes.size() < kPointBufferHeaderBytes) {
    throw parse_error{"point buffer: truncated header"};
  }
  point_buffer b;
  b.revision = get<std::uint64_t>(bytes, 0);
  b.n = get<std::uint32_t>(bytes, 8);
  b.flags = get<std::uint32_t>(bytes, 12);
  if (bytes.size() != point_buffer_size(b.n)) {
    throw parse_error{"point buffer: size does not match header"};
  }
  b.points.resize(2 * static_cast<std::size_t>(b.n));
  auto offset = kPointBufferHeaderBytes;
  for (auto& p : b.points) {
    p.x = get<float>(bytes, offset);
    p.y = get<float>(bytes, offset + 4);
    p.t = get<float>(bytes, offset + 8);
    auto const st = get<std::uint8_t>(bytes, offset + 12);
    if (st > 3) {
      throw parse_error{"point buffer: bad status"};
    }
    p.status = static_cast<point_status>(st);
    p.color = get<std::uint8_t>(bytes, offset + 13);
    offset += kPointBytes;
  }
  return b;
}

}  // namespace odcube
