#pragma once

#include <optional>
#include <vector>

#include "core/model.hpp"

namespace bm {

// Stationary buying strategy: one action per held-set state, indexed by
// subset bitmask. entry < 0 means Stop.
class Policy {
 public:
  Policy(int n, std::vector<int> action_by_mask);

  static Policy stop_everywhere(int n);

  int items() const { return n_; }
  int action(std::uint32_t mask) const { return actions_[mask]; }
  bool buys(std::uint32_t mask) const { return actions_[mask] >= 0; }
  const std::vector<int>& actions() const { return actions_; }

 private:
  int n_;
  std::vector<int> actions_;
};

// Final allocation distribution and expected total payment of a strategy.
struct Outcome {
  std::vector<WeightedSet> final_allocation;  // sorted by set, probs sum to 1
  double expected_payment = 0.0;
};

struct BestResponse {
  double utility = 0.0;
  Outcome outcome;
  // Buy-one: index of the chosen entry (nullopt = null lottery).
  std::optional<int> chosen_entry;
  // Buy-many: the optimal stationary policy.
  std::optional<Policy> policy;
};

// Highest-utility single entry, counting the free null option. Ties within
// tol go to the higher price, then to the lower entry index.
BestResponse buy_one_best_response(const Valuation& v, const Menu& menu, double tol = kTol);

// Exact optimal adaptive strategy value via a descending-cardinality sweep
// over held-set states. Entries whose draw cannot grow the current set are
// folded out through the 1/(1-q) closed form; q = 1 entries are skipped.
// Action ties within tol prefer Buy over Stop, then the higher expected
// payment, then the lower entry index.
BestResponse buy_many_best_response(const Valuation& v, const Menu& menu, double tol = kTol);

// Expected outcome of a stationary policy. Throws validation_error naming
// the looping state if a state reachable from the empty set buys an entry
// that cannot grow it.
Outcome evaluate_policy(const Policy& policy, const Menu& menu, double tol = kTol);

// Strassen-type stochastic dominance on the subset lattice: true iff there
// is a coupling with the draw from p always a superset of the draw from q.
// Decided as a transportation feasibility problem via max-flow.
bool dominates(const std::vector<WeightedSet>& p, const std::vector<WeightedSet>& q,
               double tol = kTol);

}  // namespace bm
