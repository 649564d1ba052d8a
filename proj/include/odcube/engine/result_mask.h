#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace odcube {

// One bit per trip. Bits past size() in the last word are always zero.
class result_mask {
public:
  result_mask() = default;
  explicit result_mask(std::size_t size, bool value = false);

  static result_mask full(std::size_t const size) { return result_mask{size, true}; }

  std::size_t size() const { return size_; }

  bool test(std::size_t const i) const {
    return (words_[i >> 6] >> (i & 63U)) & 1U;
  }
  void set(std::size_t const i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63U); }
  void reset(std::size_t const i) {
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63U));
  }
  void assign(std::size_t const i, bool const v) { v ? set(i) : reset(i); }

  std::size_t count() const;
  bool none() const;
  bool all() const { return count() == size_; }

  // Throw domain_error on length mismatch.
  result_mask& operator&=(result_mask const& o);
  result_mask& operator|=(result_mask const& o);
  result_mask& and_not(result_mask const& o);
  result_mask& flip();

  bool is_subset_of(result_mask const& o) const;

  std::span<std::uint64_t const> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  template <typename Fn>
  void for_each_set(Fn&& fn) const {
    for (auto w = std::size_t{0}; w != words_.size(); ++w) {
      auto bits = words_[w];
      while (bits != 0) {
        fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(result_mask const&, result_mask const&) = default;
  friend result_mask operator&(result_mask a, result_mask const& b) { return a &= b; }
  friend result_mask operator|(result_mask a, result_mask const& b) { return a |= b; }
  friend result_mask operator~(result_mask a) { return a.flip(); }

private:
  void check_size(result_mask const& o) const;
  void clear_tail();

  std::size_t size_{0};
  std::vector<std::uint64_t> words_;
};

enum class mask_op { op_and, op_or, op_not, op_and_not };

// AND / OR over >= 1 masks, NOT over exactly one, AND_NOT = first minus the
// rest. Throws domain_error on length mismatch or wrong arity.
result_mask combine(mask_op op, std::span<result_mask const> masks);

}  // namespace odcube
