#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace bm {

// A subset of item indices {0,...,n-1}. Fixed 256-item capacity so the
// set-system sampler can work on grounds far larger than the valuation
// and DP paths (which stay below 20 items and use plain bitmasks).
class ItemSet {
 public:
  static constexpr int kMaxItems = 256;

  constexpr ItemSet() = default;

  static ItemSet single(int i) {
    ItemSet s;
    s.insert(i);
    return s;
  }

  // Low-word constructor for the mask-based paths (items 0..31).
  static ItemSet from_mask(std::uint32_t mask) {
    ItemSet s;
    s.words_[0] = mask;
    return s;
  }

  static ItemSet full(int n) {
    require(n >= 0 && n <= kMaxItems, "ItemSet: item count out of range");
    ItemSet s;
    for (int i = 0; i < n; ++i) s.insert(i);
    return s;
  }

  void insert(int i) {
    check_index(i);
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
  }

  void erase(int i) {
    check_index(i);
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }

  bool contains(int i) const {
    check_index(i);
    return (words_[i >> 6] >> (i & 63)) & 1;
  }

  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  bool subset_of(const ItemSet& other) const {
    for (int k = 0; k < 4; ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

  bool superset_of(const ItemSet& other) const { return other.subset_of(*this); }

  ItemSet union_with(const ItemSet& other) const {
    ItemSet s;
    for (int k = 0; k < 4; ++k) s.words_[k] = words_[k] | other.words_[k];
    return s;
  }

  ItemSet intersect(const ItemSet& other) const {
    ItemSet s;
    for (int k = 0; k < 4; ++k) s.words_[k] = words_[k] & other.words_[k];
    return s;
  }

  // Largest member, or -1 for the empty set.
  int max_item() const {
    for (int k = 3; k >= 0; --k)
      if (words_[k]) return k * 64 + 63 - std::countl_zero(words_[k]);
    return -1;
  }

  // Bitmask over items 0..31; callers must have checked max_item() < 32.
  std::uint32_t mask() const {
    require(words_[1] == 0 && words_[2] == 0 && words_[3] == 0 && words_[0] <= 0xffffffffull,
            "ItemSet: set does not fit in a 32-bit mask");
    return static_cast<std::uint32_t>(words_[0]);
  }

  std::vector<int> members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(count()));
    for (int k = 0; k < 4; ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        int b = std::countr_zero(w);
        out.push_back(k * 64 + b);
        w &= w - 1;
      }
    }
    return out;
  }

  std::string to_string() const {
    std::string s = "{";
    bool first = true;
    for (int i : members()) {
      if (!first) s += ",";
      s += std::to_string(i);
      first = false;
    }
    return s + "}";
  }

  bool operator==(const ItemSet&) const = default;
  auto operator<=>(const ItemSet& other) const {
    for (int k = 3; k >= 0; --k)
      if (auto c = words_[k] <=> other.words_[k]; c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  static void check_index(int i) {
    require(i >= 0 && i < kMaxItems, "ItemSet: item index out of range");
  }

  std::array<std::uint64_t, 4> words_{};
};

}  // namespace bm
