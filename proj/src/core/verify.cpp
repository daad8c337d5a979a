#include "core/verify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "core/mask_menu.hpp"

namespace bm {

namespace {

using detail::entries_as_masks;
using detail::kSelfLoopCutoff;
using detail::MaskEntry;
using detail::stay_probability;

constexpr std::uint64_t kEnumerationBudget = 20'000'000;

// Depth-first enumeration of terminating stationary deterministic policies,
// assigning actions only to states reachable from the empty set. Policies
// differing on unreachable states induce the same outcome, so this covers
// exactly the achievable-outcome set.
class PolicyEnumerator {
 public:
  PolicyEnumerator(const Menu& menu, int n, double tol)
      : menu_(menu), n_(n), tol_(tol), entries_(entries_as_masks(menu, n)) {
    const std::size_t count = std::size_t{1} << n_;
    actions_.assign(count, -1);
    status_.assign(count, 0);
    full_ = static_cast<std::uint32_t>(count - 1);
  }

  std::vector<ClosureEntry> run() {
    pending_.push_back(0);
    status_[0] = 1;
    recurse();
    std::vector<ClosureEntry> out;
    out.reserve(found_.size());
    for (auto& [key, entry] : found_) out.push_back(std::move(entry));
    return out;
  }

 private:
  void recurse() {
    if (budget_-- == 0) {
      throw capacity_error("closure: policy enumeration budget exceeded");
    }
    if (pending_.empty()) {
      emit();
      return;
    }
    const std::uint32_t s = pending_.back();
    pending_.pop_back();
    status_[s] = 2;

    actions_[s] = -1;
    recurse();

    for (std::size_t e = 0; e < entries_.size(); ++e) {
      if (stay_probability(entries_[e], s) >= kSelfLoopCutoff) continue;
      actions_[s] = static_cast<int>(e);
      std::vector<std::uint32_t> added;
      for (const auto& [draw, prob] : entries_[e].draws) {
        const std::uint32_t next = s | draw;
        if (prob > 0.0 && next != s && next != full_ && status_[next] == 0) {
          status_[next] = 1;
          pending_.push_back(next);
          added.push_back(next);
        }
      }
      recurse();
      for (auto it = added.rbegin(); it != added.rend(); ++it) {
        status_[*it] = 0;
        pending_.pop_back();
      }
      actions_[s] = -1;
    }

    status_[s] = 1;
    pending_.push_back(s);
  }

  void emit() {
    Policy policy(n_, actions_);
    Outcome outcome = evaluate_policy(policy, menu_, tol_);
    std::vector<double> key;
    key.reserve(2 * outcome.final_allocation.size() + 1);
    for (const auto& ws : outcome.final_allocation) {
      key.push_back(static_cast<double>(ws.set.mask()));
      key.push_back(ws.prob);
    }
    key.push_back(outcome.expected_payment);
    found_.try_emplace(std::move(key), ClosureEntry{std::move(outcome), std::move(policy)});
  }

  const Menu& menu_;
  int n_;
  double tol_;
  std::vector<MaskEntry> entries_;
  std::uint32_t full_ = 0;
  std::vector<int> actions_;
  std::vector<char> status_;  // 0 unseen, 1 pending, 2 assigned
  std::vector<std::uint32_t> pending_;
  std::map<std::vector<double>, ClosureEntry> found_;
  std::uint64_t budget_ = kEnumerationBudget;
};

std::vector<ClosureEntry> pareto_filter(std::vector<ClosureEntry> entries, double tol) {
  std::stable_sort(entries.begin(), entries.end(), [](const ClosureEntry& a, const ClosureEntry& b) {
    return a.outcome.expected_payment < b.outcome.expected_payment;
  });
  std::vector<ClosureEntry> kept;
  for (auto& candidate : entries) {
    bool drop = false;
    for (const auto& k : kept) {
      if (k.outcome.expected_payment <= candidate.outcome.expected_payment + tol &&
          dominates(k.outcome.final_allocation, candidate.outcome.final_allocation, tol)) {
        drop = true;
        break;
      }
    }
    if (!drop) kept.push_back(std::move(candidate));
  }
  return kept;
}

}  // namespace

ClosureMenu closure(const Menu& menu, int n, double tol) {
  require_capacity(n >= 1 && n <= kMaxPolicyItems,
                   "closure: item count exceeds policy-enumeration capacity");
  require_capacity(menu.size() <= 64, "closure: too many menu entries");
  PolicyEnumerator enumerator(menu, n, tol);
  ClosureMenu result;
  result.entries = pareto_filter(enumerator.run(), tol);
  return result;
}

VerifyResult verify_buy_many(const Menu& menu, int n, double tol) {
  const ClosureMenu cl = closure(menu, n, tol);
  VerifyResult result;
  const Lottery null = Lottery::null_lottery();
  for (const auto& entry : cl.entries) {
    bool covered = false;
    if (null.price() <= entry.outcome.expected_payment + tol &&
        dominates(null.support(), entry.outcome.final_allocation, tol)) {
      covered = true;
    }
    for (std::size_t i = 0; !covered && i < menu.size(); ++i) {
      const Lottery& lot = menu.entries()[i];
      if (lot.price() <= entry.outcome.expected_payment + tol &&
          dominates(lot.support(), entry.outcome.final_allocation, tol)) {
        covered = true;
      }
    }
    if (!covered) {
      result.holds = false;
      result.witness = entry.policy;
      result.witness_outcome = entry.outcome;
      return result;
    }
  }
  return result;
}

Menu expand_item_pricing(const std::vector<double>& item_prices) {
  const int n = static_cast<int>(item_prices.size());
  require(n >= 1, "item pricing: needs at least one item");
  require_capacity(n <= kMaxTableItems, "item pricing: expansion capacity is 20 items");
  for (double p : item_prices) {
    require(std::isfinite(p) && p >= 0.0, "item pricing: prices must be finite and nonnegative");
  }
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<Lottery> entries;
  entries.reserve(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    double price = 0.0;
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
      price += item_prices[static_cast<std::size_t>(std::countr_zero(bits))];
    }
    entries.push_back(Lottery::deterministic(ItemSet::from_mask(mask), price));
  }
  return Menu(std::move(entries), Semantics::BuyMany);
}

bool valuation_level_check(const Menu& menu, const TypeDistribution& d, double tol) {
  for (const auto& atom : d.atoms()) {
    const BestResponse one = buy_one_best_response(atom.valuation, menu, tol);
    const BestResponse many = buy_many_best_response(atom.valuation, menu, tol);
    if (std::fabs(one.utility - many.utility) > tol) return false;
    if (std::fabs(one.outcome.expected_payment - many.outcome.expected_payment) > tol) return false;
  }
  return true;
}

}  // namespace bm
