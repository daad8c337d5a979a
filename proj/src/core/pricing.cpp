#include "core/pricing.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <set>

namespace bm {

namespace {

std::vector<double> mask_prices(const std::vector<double>& q) {
  const int n = static_cast<int>(q.size());
  const std::uint32_t count = std::uint32_t{1} << n;
  std::vector<double> price(count, 0.0);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    price[mask] = price[mask & (mask - 1)] + q[static_cast<std::size_t>(std::countr_zero(mask))];
  }
  return price;
}

// Seller-favorable: highest price among near-optimal bundles, then the
// lowest bundle mask (matches the expanded menu's entry order).
std::uint32_t choice_against_table(const std::vector<double>& value,
                                   const std::vector<double>& price, double tol) {
  const std::size_t count = value.size();
  double max_utility = 0.0;
  for (std::size_t mask = 0; mask < count; ++mask) {
    if (!std::isfinite(price[mask])) continue;
    max_utility = std::max(max_utility, value[mask] - price[mask]);
  }
  std::uint32_t chosen = 0;
  double best_payment = -1.0;
  for (std::size_t mask = 0; mask < count; ++mask) {
    if (!std::isfinite(price[mask])) continue;
    if (value[mask] - price[mask] < max_utility - tol) continue;
    if (price[mask] > best_payment) {
      best_payment = price[mask];
      chosen = static_cast<std::uint32_t>(mask);
    }
  }
  return chosen;
}

double payment_against_table(const std::vector<double>& value, const std::vector<double>& price,
                             double tol) {
  return price[choice_against_table(value, price, tol)];
}

std::vector<std::vector<double>> dense_tables(const TypeDistribution& d) {
  std::vector<std::vector<double>> tables;
  tables.reserve(d.atoms().size());
  for (const auto& atom : d.atoms()) tables.push_back(atom.valuation.dense_table());
  return tables;
}

double revenue_with_tables(const std::vector<double>& q, const TypeDistribution& d,
                           const std::vector<std::vector<double>>& tables, double tol) {
  const auto price = mask_prices(q);
  double total = 0.0;
  for (std::size_t a = 0; a < d.atoms().size(); ++a) {
    total += d.atoms()[a].prob * payment_against_table(tables[a], price, tol);
  }
  return total;
}

std::vector<std::vector<double>> per_item_candidates(const TypeDistribution& d) {
  const int n = d.items();
  std::vector<std::vector<double>> grids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::set<double> values;
    for (const auto& atom : d.atoms()) values.insert(atom.valuation(ItemSet::single(i)));
    grids[static_cast<std::size_t>(i)].assign(values.begin(), values.end());
  }
  return grids;
}

}  // namespace

double revenue(const Menu& menu, const TypeDistribution& d, Semantics semantics, double tol) {
  double total = 0.0;
  for (const auto& atom : d.atoms()) {
    const BestResponse br = semantics == Semantics::BuyOne
                                ? buy_one_best_response(atom.valuation, menu, tol)
                                : buy_many_best_response(atom.valuation, menu, tol);
    total += atom.prob * br.outcome.expected_payment;
  }
  return total;
}

std::vector<double> q_vector(const Menu& menu, int n) {
  std::vector<double> q(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    for (const auto& lot : menu.entries()) {
      const double p = lot.item_probability(i);
      if (p > 0.0) {
        q[static_cast<std::size_t>(i)] = std::min(q[static_cast<std::size_t>(i)], lot.price() / p);
      }
    }
  }
  return q;
}

AlphaDistribution AlphaDistribution::fixed(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "alpha distribution: alpha must be positive");
  return {{{alpha, 1.0}}};
}

AlphaDistribution AlphaDistribution::log_uniform(double lo, double hi, int points) {
  require(lo > 0.0 && hi >= lo && points >= 1, "alpha distribution: bad log-uniform parameters");
  AlphaDistribution dist;
  dist.points.reserve(static_cast<std::size_t>(points));
  const double la = std::log(lo), lb = std::log(hi);
  for (int k = 0; k < points; ++k) {
    const double t = (k + 0.5) / points;
    dist.points.emplace_back(std::exp(la + t * (lb - la)), 1.0 / points);
  }
  return dist;
}

double scaled_pricing_revenue(const std::vector<double>& q, const TypeDistribution& d,
                              const AlphaDistribution& alpha, double tol) {
  require(static_cast<int>(q.size()) == d.items(), "scaled pricing: q length must equal n");
  const auto tables = dense_tables(d);
  double total = 0.0;
  std::vector<double> scaled(q.size());
  for (const auto& [a, w] : alpha.points) {
    for (std::size_t i = 0; i < q.size(); ++i) scaled[i] = a * q[i];
    total += w * revenue_with_tables(scaled, d, tables, tol);
  }
  return total;
}

double item_pricing_payment(const Valuation& v, const std::vector<double>& q, double tol) {
  require(static_cast<int>(q.size()) == v.items(), "item pricing: q length must equal n");
  require_capacity(v.items() <= kMaxTableItems, "item pricing: capacity is 20 items");
  return payment_against_table(v.dense_table(), mask_prices(q), tol);
}

double item_pricing_revenue(const std::vector<double>& q, const TypeDistribution& d, double tol) {
  require(static_cast<int>(q.size()) == d.items(), "item pricing: q length must equal n");
  require_capacity(d.items() <= kMaxTableItems, "item pricing: capacity is 20 items");
  return revenue_with_tables(q, d, dense_tables(d), tol);
}

std::uint32_t item_pricing_choice(const Valuation& v, const std::vector<double>& q, double tol) {
  require(static_cast<int>(q.size()) == v.items(), "item pricing: q length must equal n");
  require_capacity(v.items() <= kMaxTableItems, "item pricing: capacity is 20 items");
  return choice_against_table(v.dense_table(), mask_prices(q), tol);
}

PostedPrice best_bundle_price(const TypeDistribution& d, double tol) {
  std::set<double> candidates;
  const ItemSet all = ItemSet::full(d.items());
  for (const auto& atom : d.atoms()) candidates.insert(atom.valuation(all));
  PostedPrice best;
  bool first = true;
  for (double p : candidates) {
    double rev = 0.0;
    for (const auto& atom : d.atoms()) {
      if (atom.valuation(all) >= p - tol) rev += atom.prob * p;
    }
    if (first || rev > best.revenue + tol) {
      best = {p, rev};
      first = false;
    }
  }
  return best;
}

PostedPrice best_single_item_price(const TypeDistribution& d, int item, double tol) {
  require(item >= 0 && item < d.items(), "single item price: item index out of range");
  std::set<double> candidates;
  const ItemSet s = ItemSet::single(item);
  for (const auto& atom : d.atoms()) candidates.insert(atom.valuation(s));
  PostedPrice best;
  bool first = true;
  for (double p : candidates) {
    double rev = 0.0;
    for (const auto& atom : d.atoms()) {
      if (atom.valuation(s) >= p - tol) rev += atom.prob * p;
    }
    if (first || rev > best.revenue + tol) {
      best = {p, rev};
      first = false;
    }
  }
  return best;
}

ItemPricingSearch best_item_pricing(const TypeDistribution& d, std::uint64_t seed, double tol) {
  const int n = d.items();
  require_capacity(n <= kMaxTableItems, "item pricing search: capacity is 20 items");
  const auto grids = per_item_candidates(d);
  const auto tables = dense_tables(d);

  ItemPricingSearch best;
  best.prices.assign(static_cast<std::size_t>(n), 0.0);
  best.revenue = -1.0;

  if (n <= 3) {
    best.exhaustive = true;
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::vector<double> q(static_cast<std::size_t>(n));
    while (true) {
      for (int i = 0; i < n; ++i) q[static_cast<std::size_t>(i)] = grids[static_cast<std::size_t>(i)][idx[static_cast<std::size_t>(i)]];
      const double rev = revenue_with_tables(q, d, tables, tol);
      if (rev > best.revenue + tol) {
        best.revenue = rev;
        best.prices = q;
      }
      int carry = 0;
      while (carry < n) {
        if (++idx[static_cast<std::size_t>(carry)] < grids[static_cast<std::size_t>(carry)].size()) break;
        idx[static_cast<std::size_t>(carry)] = 0;
        ++carry;
      }
      if (carry == n) break;
    }
    return best;
  }

  // Coordinate descent with random restarts; reported as a heuristic.
  std::mt19937_64 rng(seed);
  const int restarts = 8;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> q(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      const auto& g = grids[static_cast<std::size_t>(i)];
      q[static_cast<std::size_t>(i)] = g[rng() % g.size()];
    }
    double current = revenue_with_tables(q, d, tables, tol);
    bool improved = true;
    while (improved) {
      improved = false;
      for (int i = 0; i < n; ++i) {
        const double saved = q[static_cast<std::size_t>(i)];
        double local_best = current;
        double local_price = saved;
        for (double candidate : grids[static_cast<std::size_t>(i)]) {
          q[static_cast<std::size_t>(i)] = candidate;
          const double rev = revenue_with_tables(q, d, tables, tol);
          if (rev > local_best + tol) {
            local_best = rev;
            local_price = candidate;
          }
        }
        q[static_cast<std::size_t>(i)] = local_price;
        if (local_best > current + tol) {
          current = local_best;
          improved = true;
        }
      }
    }
    if (current > best.revenue + tol) {
      best.revenue = current;
      best.prices = q;
    }
  }
  return best;
}

}  // namespace bm
