#include "odcube/ingest/snapshot_io.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "odcube/core/error.h"

namespace odcube {

namespace {

constexpr char kMagic[8] = {'O', 'D', 'C', 'U', 'B', 'E', 'S', 'N'};
constexpr std::uint32_t kVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (auto i = 0; i != 8; ++i) {
    out.push_back(static_cast<char>(v & 0xFFU));
    v >>= 8;
  }
}

void put_u32(std::string& out, std::uint32_t v) {
  for (auto i = 0; i != 4; ++i) {
    out.push_back(static_cast<char>(v & 0xFFU));
    v >>= 8;
  }
}

class reader {
public:
  explicit reader(std::string_view b) : bytes_{b} {}

  std::uint64_t u64() {
    auto const b = take(8);
    auto v = std::uint64_t{0};
    for (auto i = 7; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }
  std::uint32_t u32() {
    auto const b = take(4);
    auto v = std::uint32_t{0};
    for (auto i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    }
    return v;
  }
  std::string_view take(std::size_t const n) {
    if (bytes_.size() - pos_ < n) {
      throw parse_error{"snapshot file truncated"};
    }
    auto const s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

private:
  std::string_view bytes_;
  std::size_t pos_{0};
};

}  // namespace

std::string serialize_snapshot(dataset_snapshot const& s) {
  auto const& c = s.columns();
  std::string out{kMagic, sizeof(kMagic)};
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(s.zone().name().size()));
  out += s.zone().name();
  put_u64(out, s.grid_target_cells());
  put_u64(out, s.size());
  out.reserve(out.size() + s.size() * 10 * 8);
  for (auto const* col : {&c.pickup_time, &c.dropoff_time}) {
    for (auto const v : *col) {
      put_u64(out, static_cast<std::uint64_t>(v));
    }
  }
  for (auto const* col : {&c.pickup_x, &c.pickup_y, &c.dropoff_x, &c.dropoff_y,
                          &c.duration_s, &c.distance, &c.fare, &c.passengers}) {
    for (auto const v : *col) {
      put_u64(out, std::bit_cast<std::uint64_t>(v));
    }
  }
  return out;
}

dataset_snapshot deserialize_snapshot(std::string_view const bytes) {
  reader r{bytes};
  if (r.take(sizeof(kMagic)) != std::string_view{kMagic, sizeof(kMagic)}) {
    throw parse_error{"not a snapshot file (bad magic)"};
  }
  if (auto const v = r.u32(); v != kVersion) {
    throw parse_error{"unsupported snapshot version " + std::to_string(v)};
  }
  auto const zone = std::string{r.take(r.u32())};
  auto const grid_target = r.u64();
  auto const n = r.u64();
  if (n > (bytes.size() / 80) + 1) {
    throw parse_error{"snapshot trip count inconsistent with file size"};
  }
  trip_columns c;
  for (auto* col : {&c.pickup_time, &c.dropoff_time}) {
    col->resize(n);
    for (auto& v : *col) {
      v = static_cast<std::int64_t>(r.u64());
    }
  }
  for (auto* col : {&c.pickup_x, &c.pickup_y, &c.dropoff_x, &c.dropoff_y,
                    &c.duration_s, &c.distance, &c.fare, &c.passengers}) {
    col->resize(n);
    for (auto& v : *col) {
      v = std::bit_cast<double>(r.u64());
    }
  }
  if (!r.done()) {
    throw parse_error{"trailing bytes in snapshot file"};
  }
  return dataset_snapshot{std::move(c), zone, grid_target};
}

void write_snapshot(std::filesystem::path const& path, dataset_snapshot const& s) {
  std::ofstream out{path, std::ios::binary | std::ios::trunc};
  if (!out) {
    throw error{"cannot write " + path.string()};
  }
  auto const bytes = serialize_snapshot(s);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw error{"write failed: " + path.string()};
  }
}

snapshot_ptr read_snapshot(std::filesystem::path const& path) {
  std::ifstream in{path, std::ios::binary};
  if (!in) {
    throw error{"cannot open " + path.string()};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::make_shared<dataset_snapshot const>(deserialize_snapshot(buf.str()));
}

}  // namespace odcube
