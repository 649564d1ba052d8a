#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "odcube/core/geo.h"

namespace odcube {

// Uniform grid over an extent; trip ids bucketed per cell in CSR layout.
class grid_index {
public:
  grid_index() = default;
  grid_index(bbox const& extent, std::size_t target_cells,
             std::span<double const> xs, std::span<double const> ys);

  std::size_t cols() const { return cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t cell_count() const { return cols_ * rows_; }
  std::size_t occupied_cells() const;

  std::size_t col_of(double x) const;
  std::size_t row_of(double y) const;

  std::span<std::uint32_t const> cell(std::size_t const c) const {
    return {ids_.data() + offsets_[c], ids_.data() + offsets_[c + 1]};
  }

  // Calls fn(span<uint32_t const>) for every cell overlapping `query`.
  // Together these cells hold every id whose position lies inside `query`.
  template <typename Fn>
  void for_each_candidate_cell(bbox const& query, Fn&& fn) const {
    if (cols_ == 0 || query.empty() || !extent_.intersects(query)) {
      return;
    }
    auto const c0 = col_of(query.min_x), c1 = col_of(query.max_x);
    auto const r0 = row_of(query.min_y), r1 = row_of(query.max_y);
    for (auto r = r0; r <= r1; ++r) {
      for (auto c = c0; c <= c1; ++c) {
        auto const ids = cell(r * cols_ + c);
        if (!ids.empty()) {
          fn(ids);
        }
      }
    }
  }

private:
  bbox extent_;
  std::size_t cols_{0};
  std::size_t rows_{0};
  double inv_cell_w_{0.0};
  double inv_cell_h_{0.0};
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> ids_;
};

}  // namespace odcube
