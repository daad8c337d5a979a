#include "core/buyer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

#include "core/mask_menu.hpp"

namespace bm {

namespace {

using detail::MaskEntry;
using detail::entries_as_masks;
using detail::kSelfLoopCutoff;
using detail::stay_probability;

std::vector<std::uint32_t> masks_by_descending_cardinality(int n) {
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<std::uint32_t> order(count);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) > std::popcount(b);
  });
  return order;
}

Outcome outcome_from_masks(const std::vector<double>& mass_by_mask, double payment, int n) {
  Outcome out;
  out.expected_payment = payment;
  const std::uint32_t count = std::uint32_t{1} << n;
  for (std::uint32_t s = 0; s < count; ++s) {
    if (mass_by_mask[s] > 0.0) out.final_allocation.push_back({ItemSet::from_mask(s), mass_by_mask[s]});
  }
  return out;
}

}  // namespace

Policy::Policy(int n, std::vector<int> action_by_mask) : n_(n), actions_(std::move(action_by_mask)) {
  require(n >= 1 && n <= kMaxDpItems, "policy: item count out of range");
  require(actions_.size() == (std::size_t{1} << n), "policy: needs an action for all 2^n states");
}

Policy Policy::stop_everywhere(int n) {
  return Policy(n, std::vector<int>(std::size_t{1} << n, -1));
}

BestResponse buy_one_best_response(const Valuation& v, const Menu& menu, double tol) {
  // The null lottery is always available: utility 0, price 0.
  std::vector<double> utilities(menu.size());
  double max_utility = 0.0;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    utilities[i] = utility(v, menu.entries()[i]);
    max_utility = std::max(max_utility, utilities[i]);
  }
  // Among entries within tol of the maximum, the highest price wins;
  // remaining ties go to the lowest entry index.
  double best_price = 0.0;
  std::optional<int> best_entry;
  for (std::size_t i = 0; i < menu.size(); ++i) {
    if (utilities[i] < max_utility - tol) continue;
    if (!best_entry || menu.entries()[i].price() > best_price) {
      best_entry = static_cast<int>(i);
      best_price = menu.entries()[i].price();
    }
  }
  BestResponse br;
  br.chosen_entry = best_entry;
  if (best_entry) {
    const Lottery& lot = menu.entries()[static_cast<std::size_t>(*best_entry)];
    br.utility = utilities[static_cast<std::size_t>(*best_entry)];
    br.outcome.final_allocation = lot.support();
    br.outcome.expected_payment = lot.price();
  } else {
    br.utility = 0.0;
    br.outcome.final_allocation = {{ItemSet{}, 1.0}};
    br.outcome.expected_payment = 0.0;
  }
  return br;
}

BestResponse buy_many_best_response(const Valuation& v, const Menu& menu, double tol) {
  const int n = v.items();
  const auto entries = entries_as_masks(menu, n);
  const std::vector<double> value = v.dense_table();
  const std::uint32_t count = std::uint32_t{1} << n;

  std::vector<double> best_value(count, 0.0);
  std::vector<double> payment(count, 0.0);
  std::vector<int> action(count, -1);

  for (std::uint32_t s : masks_by_descending_cardinality(n)) {
    struct Candidate {
      int entry;
      double value;
      double payment;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({-1, value[s], 0.0});
    for (std::size_t e = 0; e < entries.size(); ++e) {
      const double q = stay_probability(entries[e], s);
      if (q >= kSelfLoopCutoff) continue;  // never beneficial: no progress
      double grow_value = 0.0;
      double grow_payment = 0.0;
      for (const auto& [draw, prob] : entries[e].draws) {
        const std::uint32_t next = s | draw;
        if (next != s) {
          grow_value += prob * best_value[next];
          grow_payment += prob * payment[next];
        }
      }
      candidates.push_back({static_cast<int>(e),
                            (grow_value - entries[e].price) / (1.0 - q),
                            (entries[e].price + grow_payment) / (1.0 - q)});
    }
    double top = candidates.front().value;
    for (const auto& c : candidates) top = std::max(top, c.value);
    // Seller-favorable selection among ties: Buy beats Stop, then the
    // higher expected payment, then the lower entry index.
    const Candidate* chosen = &candidates.front();
    for (const auto& c : candidates) {
      if (c.value < top - tol) continue;
      if (chosen->value < top - tol) {
        chosen = &c;
        continue;
      }
      if (c.entry >= 0 && chosen->entry < 0) {
        chosen = &c;
      } else if (c.entry >= 0 && chosen->entry >= 0 && c.payment > chosen->payment) {
        chosen = &c;
      }
    }
    best_value[s] = top;
    action[s] = chosen->entry;
    payment[s] = chosen->payment;
  }

  Policy policy(n, std::move(action));
  BestResponse br;
  br.utility = best_value[0];
  br.outcome = evaluate_policy(policy, menu, tol);
  br.policy = std::move(policy);
  return br;
}

Outcome evaluate_policy(const Policy& policy, const Menu& menu, double tol) {
  (void)tol;
  const int n = policy.items();
  const auto entries = entries_as_masks(menu, n);
  const std::uint32_t count = std::uint32_t{1} << n;

  // Reachability from the empty set; detect self-loop purchases.
  std::vector<char> reachable(count, 0);
  std::deque<std::uint32_t> queue{0};
  reachable[0] = 1;
  while (!queue.empty()) {
    const std::uint32_t s = queue.front();
    queue.pop_front();
    const int a = policy.action(s);
    if (a < 0) continue;
    require(a < static_cast<int>(entries.size()), "policy: entry index out of range");
    const MaskEntry& e = entries[static_cast<std::size_t>(a)];
    if (stay_probability(e, s) >= kSelfLoopCutoff) {
      throw validation_error("policy does not terminate: state " +
                             ItemSet::from_mask(s).to_string() +
                             " repurchases an entry that cannot grow it");
    }
    for (const auto& [draw, prob] : e.draws) {
      const std::uint32_t next = s | draw;
      if (prob > 0.0 && next != s && !reachable[next]) {
        reachable[next] = 1;
        queue.push_back(next);
      }
    }
  }

  // Forward absorption pass in ascending cardinality (transitions only grow
  // the held set, with self-loops folded into 1/(1-q)).
  std::vector<double> inflow(count, 0.0);
  std::vector<double> absorbed(count, 0.0);
  inflow[0] = 1.0;
  double total_payment = 0.0;
  auto order = masks_by_descending_cardinality(n);
  std::reverse(order.begin(), order.end());
  for (std::uint32_t s : order) {
    if (!reachable[s] || inflow[s] <= 0.0) continue;
    const int a = policy.action(s);
    if (a < 0) {
      absorbed[s] += inflow[s];
      continue;
    }
    const MaskEntry& e = entries[static_cast<std::size_t>(a)];
    const double q = stay_probability(e, s);
    const double scale = inflow[s] / (1.0 - q);
    total_payment += scale * e.price;
    for (const auto& [draw, prob] : e.draws) {
      const std::uint32_t next = s | draw;
      if (next != s) inflow[next] += scale * prob;
    }
  }
  return outcome_from_masks(absorbed, total_payment, n);
}

bool dominates(const std::vector<WeightedSet>& p, const std::vector<WeightedSet>& q, double tol) {
  std::map<ItemSet, double> supply, demand;
  for (const auto& ws : p) {
    if (ws.prob > 0.0) supply[ws.set] += ws.prob;
  }
  for (const auto& ws : q) {
    if (ws.prob > 0.0) demand[ws.set] += ws.prob;
  }
  const int np = static_cast<int>(supply.size());
  const int nq = static_cast<int>(demand.size());
  const int source = 0;
  const int sink = np + nq + 1;
  const int vertices = np + nq + 2;
  std::vector<std::vector<double>> cap(static_cast<std::size_t>(vertices),
                                       std::vector<double>(static_cast<std::size_t>(vertices), 0.0));
  double demand_total = 0.0;
  {
    int i = 1;
    for (const auto& [set, prob] : supply) {
      cap[static_cast<std::size_t>(source)][static_cast<std::size_t>(i)] = prob;
      int j = np + 1;
      for (const auto& [dset, dprob] : demand) {
        (void)dprob;
        if (set.superset_of(dset)) cap[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 2.0;
        ++j;
      }
      ++i;
    }
    int j = np + 1;
    for (const auto& [dset, dprob] : demand) {
      (void)dset;
      cap[static_cast<std::size_t>(j)][static_cast<std::size_t>(sink)] = dprob;
      demand_total += dprob;
      ++j;
    }
  }

  // Edmonds-Karp; graph sizes here are tiny (supports <= 2^n).
  double flow = 0.0;
  while (true) {
    std::vector<int> parent(static_cast<std::size_t>(vertices), -1);
    parent[static_cast<std::size_t>(source)] = source;
    std::deque<int> bfs{source};
    while (!bfs.empty() && parent[static_cast<std::size_t>(sink)] < 0) {
      const int u = bfs.front();
      bfs.pop_front();
      for (int w = 0; w < vertices; ++w) {
        if (parent[static_cast<std::size_t>(w)] < 0 &&
            cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] > 1e-14) {
          parent[static_cast<std::size_t>(w)] = u;
          bfs.push_back(w);
        }
      }
    }
    if (parent[static_cast<std::size_t>(sink)] < 0) break;
    double push = std::numeric_limits<double>::infinity();
    for (int w = sink; w != source; w = parent[static_cast<std::size_t>(w)]) {
      push = std::min(push, cap[static_cast<std::size_t>(parent[static_cast<std::size_t>(w)])]
                                [static_cast<std::size_t>(w)]);
    }
    for (int w = sink; w != source; w = parent[static_cast<std::size_t>(w)]) {
      const int u = parent[static_cast<std::size_t>(w)];
      cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(w)] -= push;
      cap[static_cast<std::size_t>(w)][static_cast<std::size_t>(u)] += push;
    }
    flow += push;
  }
  return flow >= demand_total - tol;
}

}  // namespace bm
