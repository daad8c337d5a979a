#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "core/model.hpp"

namespace bm::detail {

inline constexpr double kSelfLoopCutoff = 1.0 - 1e-12;

// Menu entry with its allocation support lowered to bitmasks; valid for the
// DP and enumeration paths (item count <= kMaxDpItems).
struct MaskEntry {
  std::vector<std::pair<std::uint32_t, double>> draws;
  double price = 0.0;
};

inline std::vector<MaskEntry> entries_as_masks(const Menu& menu, int n) {
  require(n >= 1 && n <= kMaxDpItems, "buy-many engine: item count exceeds DP capacity");
  std::vector<MaskEntry> out;
  out.reserve(menu.size());
  for (const auto& lot : menu.entries()) {
    MaskEntry e;
    e.price = lot.price();
    for (const auto& ws : lot.support()) {
      require(ws.set.max_item() < n, "buy-many engine: entry allocates an item index >= n");
      e.draws.emplace_back(ws.set.mask(), ws.prob);
    }
    out.push_back(std::move(e));
  }
  return out;
}

// Probability that buying entry e while holding s leaves the set unchanged.
inline double stay_probability(const MaskEntry& e, std::uint32_t s) {
  double q = 0.0;
  for (const auto& [draw, prob] : e.draws) {
    if ((s | draw) == s) q += prob;
  }
  return q;
}

}  // namespace bm::detail
