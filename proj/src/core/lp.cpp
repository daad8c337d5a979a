#include "core/lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/simplex.hpp"

namespace bm {

namespace {

// Designated allocations of unit-demand atoms lose nothing by collapsing
// each drawn set to the atom's favorite item inside it.
std::vector<WeightedSet> unit_demand_support(const std::vector<WeightedSet>& support,
                                             const Valuation& v) {
  std::map<ItemSet, double> merged;
  for (const auto& ws : support) {
    ItemSet target;  // empty set stays empty
    double best = -1.0;
    for (int i : ws.set.members()) {
      const double value = v(ItemSet::single(i));
      if (value > best) {
        best = value;
        target = ItemSet::single(i);
      }
    }
    merged[target] += ws.prob;
  }
  std::vector<WeightedSet> out;
  out.reserve(merged.size());
  for (const auto& [set, prob] : merged) out.push_back({set, prob});
  return out;
}

}  // namespace

OptBuyOneResult opt_buy_one(const TypeDistribution& d, double tol) {
  const int n = d.items();
  const std::size_t atoms = d.atoms().size();
  require_capacity(n <= kMaxPolicyItems, "opt_buy_one: capacity is 4 items");
  require_capacity(atoms <= 64, "opt_buy_one: capacity is 64 atoms");

  const std::size_t sets = std::size_t{1} << n;
  // Variables: allocation weights x[a][S], then split free prices p+ / p-.
  const std::size_t price_pos = atoms * sets;
  const std::size_t price_neg = price_pos + atoms;
  const std::size_t nvars = price_neg + atoms;
  auto xvar = [sets](std::size_t a, std::size_t s) { return a * sets + s; };

  std::vector<std::vector<double>> tables;
  tables.reserve(atoms);
  for (const auto& atom : d.atoms()) tables.push_back(atom.valuation.dense_table());

  LinearProgram lp;
  lp.objective.assign(nvars, 0.0);
  for (std::size_t a = 0; a < atoms; ++a) {
    lp.objective[price_pos + a] = d.atoms()[a].prob;
    lp.objective[price_neg + a] = -d.atoms()[a].prob;
  }

  // Sub-distribution per atom: sum_S x[a][S] <= 1 (slack mass = empty set).
  for (std::size_t a = 0; a < atoms; ++a) {
    std::vector<double> row(nvars, 0.0);
    for (std::size_t s = 0; s < sets; ++s) row[xvar(a, s)] = 1.0;
    lp.rows.push_back(std::move(row));
    lp.bounds.push_back(1.0);
  }
  // IR: p_a - sum_S v_a(S) x[a][S] <= 0.
  for (std::size_t a = 0; a < atoms; ++a) {
    std::vector<double> row(nvars, 0.0);
    for (std::size_t s = 0; s < sets; ++s) row[xvar(a, s)] = -tables[a][s];
    row[price_pos + a] = 1.0;
    row[price_neg + a] = -1.0;
    lp.rows.push_back(std::move(row));
    lp.bounds.push_back(0.0);
  }
  // IC for every ordered atom pair: atom a prefers its own entry to w's.
  for (std::size_t a = 0; a < atoms; ++a) {
    for (std::size_t w = 0; w < atoms; ++w) {
      if (a == w) continue;
      std::vector<double> row(nvars, 0.0);
      for (std::size_t s = 0; s < sets; ++s) {
        row[xvar(a, s)] -= tables[a][s];
        row[xvar(w, s)] += tables[a][s];
      }
      row[price_pos + a] += 1.0;
      row[price_neg + a] -= 1.0;
      row[price_pos + w] -= 1.0;
      row[price_neg + w] += 1.0;
      lp.rows.push_back(std::move(row));
      lp.bounds.push_back(0.0);
    }
  }

  const SimplexSolution sol = solve_max(lp);

  OptBuyOneResult result;
  result.revenue = sol.objective;
  result.lp_variables = static_cast<int>(nvars);
  result.lp_constraints = static_cast<int>(lp.rows.size());
  result.simplex_iterations = sol.iterations;
  result.prices.resize(atoms);

  const bool unit_demand = d.all_unit_demand();
  std::vector<Lottery> entries;
  std::vector<std::vector<WeightedSet>> supports(atoms);
  for (std::size_t a = 0; a < atoms; ++a) {
    double price = sol.x[price_pos + a] - sol.x[price_neg + a];
    if (price < 0.0 && price > -1e-7) price = 0.0;
    result.prices[a] = price;
    std::vector<WeightedSet> support;
    double mass = 0.0;
    for (std::size_t s = 1; s < sets; ++s) {
      const double x = sol.x[xvar(a, s)];
      if (x > 1e-12) {
        support.push_back({ItemSet::from_mask(static_cast<std::uint32_t>(s)), x});
        mass += x;
      }
    }
    if (mass > 1.0) {
      // Simplex rounding can overshoot the sub-distribution row slightly.
      require(mass <= 1.0 + 1e-6, "opt_buy_one: allocation mass " + std::to_string(mass) +
                                      " violates the sub-distribution constraint");
      for (auto& ws : support) ws.prob /= mass;
      mass = 1.0;
    }
    if (mass < 1.0) support.push_back({ItemSet{}, 1.0 - mass});
    if (unit_demand) support = unit_demand_support(support, d.atoms()[a].valuation);
    supports[a] = std::move(support);
  }

  // Deduplicate designated entries by allocation (IC forces equal-allocation
  // entries to equal prices up to solver noise; keep the minimum).
  result.designated_entry.assign(atoms, -1);
  std::map<std::vector<double>, int> slots;
  std::vector<double> slot_price;
  std::vector<std::vector<WeightedSet>> slot_support;
  for (std::size_t a = 0; a < atoms; ++a) {
    std::vector<double> key;
    key.reserve(2 * supports[a].size());
    for (const auto& ws : supports[a]) {
      key.push_back(static_cast<double>(ws.set.mask()));
      key.push_back(ws.prob);
    }
    auto [it, inserted] = slots.try_emplace(std::move(key), static_cast<int>(slot_price.size()));
    if (inserted) {
      slot_price.push_back(result.prices[a]);
      slot_support.push_back(supports[a]);
    } else {
      slot_price[static_cast<std::size_t>(it->second)] =
          std::min(slot_price[static_cast<std::size_t>(it->second)], result.prices[a]);
    }
    result.designated_entry[a] = it->second;
  }
  for (std::size_t s = 0; s < slot_price.size(); ++s) {
    entries.emplace_back(slot_support[s], slot_price[s], tol);
  }
  result.menu = Menu(std::move(entries), Semantics::BuyOne);
  return result;
}

PostedPrice opt_single_parameter(const TypeDistribution& d, bool check_structure, double tol) {
  const int n = d.items();
  if (check_structure) {
    require_capacity(n <= kMaxTableItems, "opt_single_parameter: structure check capacity is 20 items");
    for (std::size_t a = 0; a < d.atoms().size(); ++a) {
      const auto table = d.atoms()[a].valuation.dense_table();
      const double full = table.back();
      for (std::size_t s = 1; s < table.size(); ++s) {
        require(std::fabs(table[s] - full) <= tol,
                "opt_single_parameter: atom " + std::to_string(a) +
                    " is not single-parameter (v(S) != v([n]))");
      }
    }
  }
  return best_bundle_price(d, tol);
}

}  // namespace bm
