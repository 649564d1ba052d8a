#include "odcube/engine/result_mask.h"

#include <string>

#include "odcube/core/error.h"

namespace odcube {

result_mask::result_mask(std::size_t const size, bool const value)
    : size_{size}, words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0) {
  clear_tail();
}

void result_mask::clear_tail() {
  if (auto const rem = size_ & 63U; rem != 0) {
    words_.back() &= (std::uint64_t{1} << rem) - 1;
  }
}

void result_mask::check_size(result_mask const& o) const {
  if (o.size_ != size_) {
    throw domain_error{"mask length mismatch: " + std::to_string(size_) +
                       " vs " + std::to_string(o.size_)};
  }
}

std::size_t result_mask::count() const {
  auto c = std::size_t{0};
  for (auto const w : words_) {
    c += static_cast<std::size_t>(std::popcount(w));
  }
  return c;
}

bool result_mask::none() const {
  for (auto const w : words_) {
    if (w != 0) {
      return false;
    }
  }
  return true;
}

result_mask& result_mask::operator&=(result_mask const& o) {
  check_size(o);
  for (auto i = std::size_t{0}; i != words_.size(); ++i) {
    words_[i] &= o.words_[i];
  }
  return *this;
}

result_mask& result_mask::operator|=(result_mask const& o) {
  check_size(o);
  for (auto i = std::size_t{0}; i != words_.size(); ++i) {
    words_[i] |= o.words_[i];
  }
  return *this;
}

result_mask& result_mask::and_not(result_mask const& o) {
  check_size(o);
  for (auto i = std::size_t{0}; i != words_.size(); ++i) {
    words_[i] &= ~o.words_[i];
  }
  return *this;
}

result_mask& result_mask::flip() {
  for (auto& w : words_) {
    w = ~w;
  }
  clear_tail();
  return *this;
}

bool result_mask::is_subset_of(result_mask const& o) const {
  check_size(o);
  for (auto i = std::size_t{0}; i != words_.size(); ++i) {
    if ((words_[i] & ~o.words_[i]) != 0) {
      return false;
    }
  }
  return true;
}

result_mask combine(mask_op const op, std::span<result_mask const> masks) {
  if (masks.empty()) {
    throw domain_error{"combine needs at least one mask"};
  }
  for (auto const& m : masks) {
    if (m.size() != masks.front().size()) {
      throw domain_error{"mask length mismatch in combine"};
    }
  }
  auto out = masks.front();
  switch (op) {
    case mask_op::op_and:
      for (auto const& m : masks.subspan(1)) {
        out &= m;
      }
      break;
    case mask_op::op_or:
      for (auto const& m : masks.subspan(1)) {
        out |= m;
      }
      break;
    case mask_op::op_not:
      if (masks.size() != 1) {
        throw domain_error{"NOT takes exactly one mask"};
      }
      out.flip();
      break;
    case mask_op::op_and_not:
      if (masks.size() < 2) {
        throw domain_error{"AND_NOT takes at least two masks"};
      }
      for (auto const& m : masks.subspan(1)) {
        out.and_not(m);
      }
      break;
  }
  return out;
}

}  // namespace odcube
