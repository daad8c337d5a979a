#include "core/selftest.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>

#include "core/buyer.hpp"
#include "core/gen.hpp"
#include "core/lp.hpp"
#include "core/pricing.hpp"
#include "core/verify.hpp"

namespace bm {

namespace {

struct Harness {
  SelfTestResult result;

  void check(bool cond, const std::string& label) {
    ++result.checks;
    if (!cond) result.failures.push_back(label);
  }
};

TypeDistribution random_distribution(int n, int atoms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> value(0.0, 10.0);
  std::vector<TypeDistribution::Atom> list;
  std::vector<double> weights(static_cast<std::size_t>(atoms));
  double total = 0.0;
  for (double& w : weights) {
    w = 1.0 + static_cast<double>(rng() % 8);
    total += w;
  }
  for (int a = 0; a < atoms; ++a) {
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (double& v : vals) v = value(rng);
    Valuation v = (rng() % 2) ? Valuation::additive(vals) : Valuation::unit_demand(vals);
    list.push_back({weights[static_cast<std::size_t>(a)] / total, std::move(v)});
  }
  return TypeDistribution(std::move(list));
}

Menu random_menu(int n, int entries, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> price(0.0, 8.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::uint32_t sets = std::uint32_t{1} << n;
  std::vector<Lottery> lots;
  for (int e = 0; e < entries; ++e) {
    const int support = 1 + static_cast<int>(rng() % 3);
    std::vector<WeightedSet> draws;
    std::vector<double> probs(static_cast<std::size_t>(support));
    double total = 0.0;
    for (double& p : probs) {
      p = 0.05 + unif(rng);
      total += p;
    }
    for (int k = 0; k < support; ++k) {
      draws.push_back({ItemSet::from_mask(static_cast<std::uint32_t>(rng() % sets)),
                       probs[static_cast<std::size_t>(k)] / total});
    }
    lots.emplace_back(std::move(draws), price(rng));
  }
  return Menu(std::move(lots), Semantics::BuyMany);
}

// Exhaustive stationary-policy maximum: every assignment of Stop/Buy(e) to
// the 2^n - 1 non-full states, scored through evaluate_policy.
bool enumeration_matches_dp(const Valuation& v, const Menu& menu, double tol) {
  const int n = v.items();
  const std::uint32_t states = std::uint32_t{1} << n;
  const int choices = static_cast<int>(menu.size()) + 1;
  double best_utility = 0.0;
  double best_payment = 0.0;
  std::vector<int> actions(states, -1);
  std::uint64_t combos = 1;
  for (std::uint32_t s = 0; s + 1 < states; ++s) combos *= static_cast<std::uint64_t>(choices);
  for (std::uint64_t code = 0; code < combos; ++code) {
    std::uint64_t rest = code;
    for (std::uint32_t s = 0; s + 1 < states; ++s) {
      actions[s] = static_cast<int>(rest % static_cast<std::uint64_t>(choices)) - 1;
      rest /= static_cast<std::uint64_t>(choices);
    }
    actions[states - 1] = -1;
    try {
      const Outcome out = evaluate_policy(Policy(n, actions), menu, tol);
      double value = 0.0;
      for (const auto& ws : out.final_allocation) value += ws.prob * v(ws.set);
      const double u = value - out.expected_payment;
      if (u > best_utility + 1e-12) {
        best_utility = u;
        best_payment = out.expected_payment;
      } else if (u >= best_utility - 1e-12) {
        best_payment = std::max(best_payment, out.expected_payment);
      }
    } catch (const validation_error&) {
      // non-terminating policy; not a strategy
    }
  }
  const BestResponse dp = buy_many_best_response(v, menu, tol);
  return std::fabs(dp.utility - best_utility) <= 1e-9 &&
         std::fabs(dp.outcome.expected_payment - best_payment) <= 1e-9;
}

}  // namespace

SelfTestResult run_selftest(std::uint64_t seed) {
  Harness h;
  std::mt19937_64 rng(seed);
  const double tol = kTol;

  // DP vs exhaustive policy enumeration.
  for (int round = 0; round < 40; ++round) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const int entries = 1 + static_cast<int>(rng() % 3);
    const Menu menu = random_menu(n, entries, rng);
    const TypeDistribution d = random_distribution(n, 1, rng);
    std::ostringstream label;
    label << "dp-vs-enumeration round " << round;
    h.check(enumeration_matches_dp(d.atoms().front().valuation, menu, tol), label.str());
  }

  // Dominance basics.
  {
    const auto d01 = Lottery::deterministic(ItemSet::from_mask(3), 1.0).support();
    std::vector<WeightedSet> halves = {{ItemSet::single(0), 0.5}, {ItemSet::single(1), 0.5}};
    h.check(dominates(d01, halves, tol), "dominance: pair covers split singletons");
    h.check(!dominates(halves, d01, tol), "dominance: singletons cannot cover the pair");
    h.check(dominates(halves, halves, tol), "dominance: reflexive");
  }

  // Expanded item pricings always satisfy the buy-many constraint.
  std::uniform_real_distribution<double> price(0.0, 5.0);
  for (int round = 0; round < 10; ++round) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<double> q(static_cast<std::size_t>(n));
    for (double& x : q) x = price(rng);
    std::ostringstream label;
    label << "verify expanded pricing round " << round;
    h.check(verify_buy_many(expand_item_pricing(q), n, tol).holds, label.str());
  }

  // LP sanity against posted-price optima.
  for (int round = 0; round < 6; ++round) {
    const int n = 1 + static_cast<int>(rng() % 2);
    const TypeDistribution d = random_distribution(n, 2 + static_cast<int>(rng() % 3), rng);
    const OptBuyOneResult opt = opt_buy_one(d, tol);
    const PostedPrice bundle = best_bundle_price(d, tol);
    std::ostringstream label;
    label << "lp dominates bundle pricing round " << round;
    h.check(opt.revenue >= bundle.revenue - 1e-7, label.str());
  }

  // Counterexample headline numbers.
  {
    const CounterexampleInstance cx = gen_counterexample(4, 0.5, 1.0);
    const Menu pricing = expand_item_pricing(cx.item_prices);
    const double rev = revenue(pricing, cx.d, Semantics::BuyMany, tol);
    h.check(std::fabs(rev - 4.0) <= 1e-9, "counterexample pricing revenue is 4.0");
    const PostedPrice single = opt_single_parameter(cx.d_perturbed, true, tol);
    h.check(std::fabs(single.revenue - 3.75) <= 1e-9, "perturbed optimal bundle revenue is 3.75");
  }

  return h.result;
}

}  // namespace bm
