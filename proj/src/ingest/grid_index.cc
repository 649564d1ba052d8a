#include "odcube/ingest/grid_index.h"

#include <algorithm>
#include <cmath>

namespace odcube {

grid_index::grid_index(bbox const& extent, std::size_t const target_cells,
                       std::span<double const> xs, std::span<double const> ys)
    : extent_{extent} {
  auto const target = std::max<std::size_t>(1, target_cells);
  auto const w = extent.width();
  auto const h = extent.height();
  if (w <= 0.0 && h <= 0.0) {
    cols_ = rows_ = 1;
  } else if (w <= 0.0) {
    cols_ = 1;
    rows_ = target;
  } else if (h <= 0.0) {
    cols_ = target;
    rows_ = 1;
  } else {
    auto const c = std::llround(std::sqrt(static_cast<double>(target) * w / h));
    cols_ = static_cast<std::size_t>(std::clamp<long long>(
        c, 1, static_cast<long long>(target)));
    rows_ = (target + cols_ - 1) / cols_;
  }
  inv_cell_w_ = w > 0.0 ? static_cast<double>(cols_) / w : 0.0;
  inv_cell_h_ = h > 0.0 ? static_cast<double>(rows_) / h : 0.0;

  auto const n = xs.size();
  std::vector<std::uint32_t> cell_of(n);
  offsets_.assign(cell_count() + 1, 0);
  for (auto i = std::size_t{0}; i != n; ++i) {
    auto const c = row_of(ys[i]) * cols_ + col_of(xs[i]);
    cell_of[i] = static_cast<std::uint32_t>(c);
    ++offsets_[c + 1];
  }
  for (auto c = std::size_t{0}; c != cell_count(); ++c) {
    offsets_[c + 1] += offsets_[c];
  }
  ids_.resize(n);
  auto cursor = std::vector<std::uint32_t>(begin(offsets_), end(offsets_) - 1);
  for (auto i = std::size_t{0}; i != n; ++i) {
    ids_[cursor[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::size_t grid_index::occupied_cells() const {
  auto count = std::size_t{0};
  for (auto c = std::size_t{0}; c != cell_count(); ++c) {
    count += offsets_[c + 1] != offsets_[c] ? 1U : 0U;
  }
  return count;
}

// Both are monotone in their argument, so a point inside a query box always
// lands in a cell between the box's corner cells.
std::size_t grid_index::col_of(double const x) const {
  auto const f = std::floor((x - extent_.min_x) * inv_cell_w_);
  if (!(f > 0.0)) {
    return 0;
  }
  return std::min(cols_ - 1, static_cast<std::size_t>(f));
}

std::size_t grid_index::row_of(double const y) const {
  auto const f = std::floor((y - extent_.min_y) * inv_cell_h_);
  if (!(f > 0.0)) {
    return 0;
  }
  return std::min(rows_ - 1, static_cast<std::size_t>(f));
}

}  // namespace odcube
