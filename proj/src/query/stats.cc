#include "odcube/query/stats.h"

#include <algorithm>
#include <limits>

#include "odcube/core/error.h"

namespace odcube {

trip_stats compute_stats(dataset_snapshot const& s, result_mask const& mask) {
  if (mask.size() != s.size()) {
    throw domain_error{"stats: mask length does not match trip count"};
  }
  trip_stats out;
  std::array<double, 4> sum{};
  std::array<double, 4> lo;
  std::array<double, 4> hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  std::array<std::span<double const>, 4> cols;
  for (auto const a : kAllAttributes) {
    cols[static_cast<std::size_t>(a)] = s.attribute_column(a);
  }
  mask.for_each_set([&](std::size_t const i) {
    ++out.count;
    for (auto a = std::size_t{0}; a != 4; ++a) {
      auto const v = cols[a][i];
      sum[a] += v;
      lo[a] = std::min(lo[a], v);
      hi[a] = std::max(hi[a], v);
    }
  });
  if (out.count == 0) {
    return out;
  }
  for (auto a = std::size_t{0}; a != 4; ++a) {
    auto const mean =
        std::clamp(sum[a] / static_cast<double>(out.count), lo[a], hi[a]);
    out.attributes[a] = attribute_summary{mean, lo[a], hi[a]};
  }
  return out;
}

}  // namespace odcube
