#pragma once

// Shared helpers for the test suites: seeded random instances and a
// test-side brute-force oracle for adaptive buying. The oracle evaluates
// stationary policies by backward substitution over the subset lattice and
// is kept independent of the library's forward-absorption implementation.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "core/buyer.hpp"
#include "core/model.hpp"

namespace testsupport {

inline double quantized(std::mt19937_64& rng, double lo, double hi, double step = 1e-3) {
  std::uniform_real_distribution<double> u(lo, hi);
  return std::round(u(rng) / step) * step;
}

inline bm::Valuation random_valuation(int n, std::mt19937_64& rng, bool unit_demand_only = false) {
  std::vector<double> vals(static_cast<std::size_t>(n));
  for (double& v : vals) v = quantized(rng, 0.0, 10.0);
  if (unit_demand_only || rng() % 2 == 0) return bm::Valuation::unit_demand(std::move(vals));
  return bm::Valuation::additive(std::move(vals));
}

inline bm::TypeDistribution random_distribution(int n, int atoms, std::mt19937_64& rng,
                                                bool unit_demand_only = false) {
  std::vector<bm::TypeDistribution::Atom> list;
  std::vector<double> weights(static_cast<std::size_t>(atoms));
  double total = 0.0;
  for (double& w : weights) {
    w = 1.0 + static_cast<double>(rng() % 8);
    total += w;
  }
  for (int a = 0; a < atoms; ++a) {
    list.push_back({weights[static_cast<std::size_t>(a)] / total,
                    random_valuation(n, rng, unit_demand_only)});
  }
  return bm::TypeDistribution(std::move(list));
}

// Random menu of lotteries with small supports; probabilities are dyadic
// multiples so ties stay reproducible.
inline bm::Menu random_lottery_menu(int n, int entries, std::mt19937_64& rng) {
  const std::uint32_t sets = std::uint32_t{1} << n;
  std::vector<bm::Lottery> lots;
  for (int e = 0; e < entries; ++e) {
    const int support = 1 + static_cast<int>(rng() % 3);
    std::vector<int> weights(static_cast<std::size_t>(support));
    int total = 0;
    for (int& w : weights) {
      w = 1 + static_cast<int>(rng() % 7);
      total += w;
    }
    std::vector<bm::WeightedSet> draws;
    for (int k = 0; k < support; ++k) {
      draws.push_back({bm::ItemSet::from_mask(static_cast<std::uint32_t>(rng() % sets)),
                       static_cast<double>(weights[static_cast<std::size_t>(k)]) / total});
    }
    lots.emplace_back(std::move(draws), quantized(rng, 0.0, 8.0));
  }
  return bm::Menu(std::move(lots), bm::Semantics::BuyMany);
}

inline bm::Menu random_deterministic_menu(int n, int entries, std::mt19937_64& rng) {
  const std::uint32_t sets = std::uint32_t{1} << n;
  std::vector<bm::Lottery> lots;
  for (int e = 0; e < entries; ++e) {
    lots.push_back(bm::Lottery::deterministic(
        bm::ItemSet::from_mask(static_cast<std::uint32_t>(rng() % sets)),
        quantized(rng, 0.0, 8.0)));
  }
  return bm::Menu(std::move(lots), bm::Semantics::BuyMany);
}

inline std::vector<bm::WeightedSet> random_set_distribution(int n, int support,
                                                            std::mt19937_64& rng) {
  const std::uint32_t sets = std::uint32_t{1} << n;
  std::map<std::uint32_t, double> merged;
  std::vector<int> weights(static_cast<std::size_t>(support));
  int total = 0;
  for (int& w : weights) {
    w = 1 + static_cast<int>(rng() % 7);
    total += w;
  }
  for (int k = 0; k < support; ++k) {
    merged[static_cast<std::uint32_t>(rng() % sets)] +=
        static_cast<double>(weights[static_cast<std::size_t>(k)]) / total;
  }
  std::vector<bm::WeightedSet> out;
  for (const auto& [mask, prob] : merged) out.push_back({bm::ItemSet::from_mask(mask), prob});
  return out;
}

// ---- test-side oracle -----------------------------------------------------

struct OracleOutcome {
  bool terminates = false;
  double payment = 0.0;
  std::map<std::uint32_t, double> allocation;
  double value(const bm::Valuation& v) const {
    double total = 0.0;
    for (const auto& [mask, prob] : allocation) total += prob * v.value_mask(mask);
    return total;
  }
};

// Backward substitution: from the full set down, each Buy state folds its
// self-loop with a geometric factor and mixes its successors' absorption
// distributions. Looping states poison everything that can reach them.
inline OracleOutcome oracle_evaluate_policy(int n, const std::vector<int>& actions,
                                            const bm::Menu& menu) {
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<std::map<std::uint32_t, double>> alloc(count);
  std::vector<double> pay(count, 0.0);
  std::vector<char> bad(count, 0);

  std::vector<std::uint32_t> order;
  for (std::uint32_t s = 0; s < count; ++s) order.push_back(s);
  std::sort(order.begin(), order.end(), [](std::uint32_t a, std::uint32_t b) {
    return std::popcount(a) > std::popcount(b);
  });

  for (std::uint32_t s : order) {
    const int act = actions[s];
    if (act < 0) {
      alloc[s][s] = 1.0;
      continue;
    }
    const bm::Lottery& lot = menu.entries()[static_cast<std::size_t>(act)];
    double stay = 0.0;
    for (const auto& ws : lot.support()) {
      if ((s | ws.set.mask()) == s) stay += ws.prob;
    }
    if (stay >= 1.0 - 1e-12) {
      bad[s] = 1;
      continue;
    }
    bool poisoned = false;
    double payment = lot.price();
    std::map<std::uint32_t, double> mix;
    for (const auto& ws : lot.support()) {
      const std::uint32_t next = s | ws.set.mask();
      if (next == s) continue;
      if (bad[next]) {
        poisoned = true;
        break;
      }
      payment += ws.prob * pay[next];
      for (const auto& [mask, prob] : alloc[next]) mix[mask] += ws.prob * prob;
    }
    if (poisoned) {
      bad[s] = 1;
      continue;
    }
    pay[s] = payment / (1.0 - stay);
    for (auto& [mask, prob] : mix) alloc[s][mask] = prob / (1.0 - stay);
  }

  OracleOutcome out;
  if (bad[0]) return out;
  out.terminates = true;
  out.payment = pay[0];
  out.allocation = alloc[0];
  return out;
}

struct OracleBest {
  double utility = 0.0;
  double payment = 0.0;  // max payment among utility-optimal policies
};

// Exhaustive maximum over every stationary deterministic policy (the full
// set always stops). Policies that cannot terminate are not strategies.
inline OracleBest oracle_buy_many(const bm::Valuation& v, const bm::Menu& menu) {
  const int n = v.items();
  const std::uint32_t states = std::uint32_t{1} << n;
  const std::uint64_t choices = menu.size() + 1;
  std::uint64_t combos = 1;
  for (std::uint32_t s = 0; s + 1 < states; ++s) combos *= choices;

  OracleBest best;  // stop-everywhere achieves utility 0, payment 0
  std::vector<int> actions(states, -1);
  for (std::uint64_t code = 0; code < combos; ++code) {
    std::uint64_t rest = code;
    for (std::uint32_t s = 0; s + 1 < states; ++s) {
      actions[s] = static_cast<int>(rest % choices) - 1;
      rest /= choices;
    }
    actions[states - 1] = -1;
    const OracleOutcome out = oracle_evaluate_policy(n, actions, menu);
    if (!out.terminates) continue;
    const double u = out.value(v) - out.payment;
    if (u > best.utility + 1e-12) {
      best.utility = u;
      best.payment = out.payment;
    } else if (u >= best.utility - 1e-12 && out.payment > best.payment) {
      best.payment = out.payment;
    }
  }
  return best;
}

}  // namespace testsupport
