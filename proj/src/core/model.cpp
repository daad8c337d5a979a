#include "core/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bm {

namespace {

void check_item_values(const std::vector<double>& vals, const char* what) {
  require(!vals.empty(), std::string(what) + ": needs at least one item");
  require(vals.size() <= ItemSet::kMaxItems, std::string(what) + ": too many items");
  for (double v : vals) {
    require(std::isfinite(v) && v >= 0.0, std::string(what) + ": values must be finite and nonnegative");
  }
}

}  // namespace

std::string to_string(ValuationKind kind) {
  switch (kind) {
    case ValuationKind::Table: return "table";
    case ValuationKind::Additive: return "additive";
    case ValuationKind::UnitDemand: return "unitdemand";
    case ValuationKind::Xos: return "xos";
  }
  return "?";
}

std::string to_string(Semantics s) {
  return s == Semantics::BuyOne ? "buyone" : "buymany";
}

Valuation Valuation::table(int n, std::vector<double> values_by_mask) {
  require(n >= 1 && n <= kMaxTableItems, "table valuation: n must be in [1,20]");
  const std::size_t size = std::size_t{1} << n;
  require(values_by_mask.size() == size, "table valuation: expected 2^n values");
  for (double v : values_by_mask) {
    require(std::isfinite(v) && v >= 0.0, "table valuation: values must be finite and nonnegative");
  }
  require(values_by_mask[0] == 0.0, "table valuation: v(empty set) must be 0");
  // Monotone iff removing any single item never increases the value.
  for (std::uint32_t mask = 1; mask < size; ++mask) {
    for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
      const std::uint32_t sub = mask & ~(bits & (~bits + 1));
      require(values_by_mask[sub] <= values_by_mask[mask] + kTol,
              "table valuation: not monotone at mask " + std::to_string(mask));
    }
  }
  Valuation v;
  v.kind_ = ValuationKind::Table;
  v.n_ = n;
  v.values_ = std::move(values_by_mask);
  return v;
}

Valuation Valuation::additive(std::vector<double> item_values) {
  check_item_values(item_values, "additive valuation");
  Valuation v;
  v.kind_ = ValuationKind::Additive;
  v.n_ = static_cast<int>(item_values.size());
  v.values_ = std::move(item_values);
  return v;
}

Valuation Valuation::unit_demand(std::vector<double> item_values) {
  check_item_values(item_values, "unit-demand valuation");
  Valuation v;
  v.kind_ = ValuationKind::UnitDemand;
  v.n_ = static_cast<int>(item_values.size());
  v.values_ = std::move(item_values);
  return v;
}

Valuation Valuation::xos(int n, std::vector<std::vector<double>> clauses) {
  require(n >= 1 && n <= ItemSet::kMaxItems, "xos valuation: bad item count");
  require(!clauses.empty(), "xos valuation: needs at least one clause");
  for (const auto& c : clauses) {
    require(static_cast<int>(c.size()) == n, "xos valuation: clause length must equal n");
    for (double w : c) {
      require(std::isfinite(w) && w >= 0.0, "xos valuation: clause weights must be finite and nonnegative");
    }
  }
  Valuation v;
  v.kind_ = ValuationKind::Xos;
  v.n_ = n;
  v.clauses_ = std::move(clauses);
  return v;
}

double Valuation::operator()(const ItemSet& s) const {
  require(s.max_item() < n_, "evaluate: item index out of range for this valuation");
  switch (kind_) {
    case ValuationKind::Table:
      return values_[s.mask()];
    case ValuationKind::Additive: {
      double total = 0.0;
      for (int i : s.members()) total += values_[static_cast<std::size_t>(i)];
      return total;
    }
    case ValuationKind::UnitDemand: {
      double best = 0.0;
      for (int i : s.members()) best = std::max(best, values_[static_cast<std::size_t>(i)]);
      return best;
    }
    case ValuationKind::Xos: {
      double best = 0.0;
      for (const auto& clause : clauses_) {
        double sum = 0.0;
        for (int i : s.members()) sum += clause[static_cast<std::size_t>(i)];
        best = std::max(best, sum);
      }
      return best;
    }
  }
  return 0.0;
}

double Valuation::value_mask(std::uint32_t mask) const {
  if (kind_ == ValuationKind::Table) {
    require(mask < (std::uint32_t{1} << n_), "evaluate: mask out of range");
    return values_[mask];
  }
  return (*this)(ItemSet::from_mask(mask));
}

std::vector<double> Valuation::dense_table() const {
  require(n_ <= kMaxTableItems, "dense_table: too many items");
  const std::size_t size = std::size_t{1} << n_;
  std::vector<double> out(size, 0.0);
  switch (kind_) {
    case ValuationKind::Table:
      out = values_;
      break;
    case ValuationKind::Additive:
      for (std::uint32_t mask = 1; mask < size; ++mask) {
        const std::uint32_t low = mask & (mask - 1);
        out[mask] = out[low] + values_[static_cast<std::size_t>(std::countr_zero(mask))];
      }
      break;
    case ValuationKind::UnitDemand:
      for (std::uint32_t mask = 1; mask < size; ++mask) {
        const std::uint32_t low = mask & (mask - 1);
        out[mask] = std::max(out[low], values_[static_cast<std::size_t>(std::countr_zero(mask))]);
      }
      break;
    case ValuationKind::Xos:
      for (const auto& clause : clauses_) {
        std::vector<double> sums(size, 0.0);
        for (std::uint32_t mask = 1; mask < size; ++mask) {
          const std::uint32_t low = mask & (mask - 1);
          sums[mask] = sums[low] + clause[static_cast<std::size_t>(std::countr_zero(mask))];
        }
        for (std::size_t i = 0; i < size; ++i) out[i] = std::max(out[i], sums[i]);
      }
      break;
  }
  return out;
}

Valuation Valuation::scaled(double factor) const {
  require(std::isfinite(factor) && factor >= 0.0, "scaled: factor must be finite and nonnegative");
  Valuation v = *this;
  for (double& x : v.values_) x *= factor;
  for (auto& clause : v.clauses_)
    for (double& x : clause) x *= factor;
  return v;
}

Lottery::Lottery(std::vector<WeightedSet> allocation, double price, double tol) {
  require(std::isfinite(price) && price >= 0.0, "lottery: price must be finite and nonnegative");
  std::map<ItemSet, double> merged;
  double total = 0.0;
  for (const auto& ws : allocation) {
    require(std::isfinite(ws.prob) && ws.prob >= 0.0, "lottery: probabilities must be finite and nonnegative");
    merged[ws.set] += ws.prob;
    total += ws.prob;
  }
  require(std::fabs(total - 1.0) <= tol,
          "lottery: probabilities sum to " + std::to_string(total) + ", expected 1");
  support_.reserve(merged.size());
  for (const auto& [set, prob] : merged) {
    if (prob > 0.0) support_.push_back({set, prob});
  }
  if (support_.empty()) support_.push_back({ItemSet{}, 1.0});
  price_ = price;
}

Lottery Lottery::null_lottery() { return Lottery({{ItemSet{}, 1.0}}, 0.0); }

Lottery Lottery::deterministic(const ItemSet& s, double price) {
  return Lottery({{s, 1.0}}, price);
}

double Lottery::item_probability(int i) const {
  double p = 0.0;
  for (const auto& ws : support_) {
    if (ws.set.contains(i)) p += ws.prob;
  }
  return p;
}

bool Lottery::same_allocation(const Lottery& other, double tol) const {
  if (support_.size() != other.support_.size()) return false;
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].set != other.support_[i].set) return false;
    if (std::fabs(support_[i].prob - other.support_[i].prob) > tol) return false;
  }
  return true;
}

double lottery_value(const Valuation& v, const Lottery& lot) {
  double total = 0.0;
  for (const auto& ws : lot.support()) total += ws.prob * v(ws.set);
  return total;
}

double utility(const Valuation& v, const Lottery& lot) {
  return lottery_value(v, lot) - lot.price();
}

Menu::Menu(std::vector<Lottery> entries, Semantics semantics) : semantics_(semantics) {
  // Collapse duplicate allocation distributions to their minimum price.
  // Keyed by exact canonical support so the expanded-item-pricing
  // construction (up to 2^20 entries) stays fast.
  std::map<std::vector<WeightedSet>, std::size_t> seen;
  entries_.reserve(entries.size());
  for (auto& lot : entries) {
    auto key = lot.support();
    auto [it, inserted] = seen.try_emplace(std::move(key), entries_.size());
    if (inserted) {
      entries_.push_back(std::move(lot));
    } else if (lot.price() < entries_[it->second].price()) {
      entries_[it->second] = std::move(lot);
    }
  }
}

Menu Menu::with_semantics(Semantics s) const {
  Menu m = *this;
  m.semantics_ = s;
  return m;
}

Menu Menu::scaled_prices(double factor) const {
  require(std::isfinite(factor) && factor >= 0.0, "scaled_prices: factor must be finite and nonnegative");
  std::vector<Lottery> scaled;
  scaled.reserve(entries_.size());
  for (const auto& lot : entries_) {
    scaled.emplace_back(lot.support(), lot.price() * factor);
  }
  return Menu(std::move(scaled), semantics_);
}

TypeDistribution::TypeDistribution(std::vector<Atom> atoms, double tol) {
  require(!atoms.empty(), "type distribution: needs at least one atom");
  n_ = atoms.front().valuation.items();
  double total = 0.0;
  for (const auto& a : atoms) {
    require(std::isfinite(a.prob) && a.prob >= 0.0, "type distribution: probabilities must be nonnegative");
    require(a.valuation.items() == n_, "type distribution: all atoms must share the same item count");
    total += a.prob;
  }
  require(std::fabs(total - 1.0) <= tol,
          "type distribution: probabilities sum to " + std::to_string(total) + ", expected 1");
  atoms_ = std::move(atoms);
}

bool TypeDistribution::all_unit_demand() const {
  return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) {
    return a.valuation.kind() == ValuationKind::UnitDemand;
  });
}

MarginalAllocation::MarginalAllocation(std::vector<double> per_item) : x_(std::move(per_item)) {
  require(!x_.empty(), "marginal allocation: needs at least one item");
  double total = 0.0;
  for (double p : x_) {
    require(std::isfinite(p) && p >= 0.0, "marginal allocation: probabilities must be nonnegative");
    total += p;
  }
  require(total <= 1.0 + kTol, "marginal allocation: probabilities sum above 1");
}

MarginalAllocation MarginalAllocation::from_lottery(const Lottery& lot, int n) {
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  for (const auto& ws : lot.support()) {
    if (ws.set.empty()) continue;
    require(ws.set.count() == 1, "marginal allocation: lottery support must be singletons plus the empty set");
    x[static_cast<std::size_t>(ws.set.max_item())] += ws.prob;
  }
  return MarginalAllocation(std::move(x));
}

Lottery MarginalAllocation::to_lottery(double price) const {
  std::vector<WeightedSet> support;
  double total = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (x_[i] > 0.0) {
      support.push_back({ItemSet::single(static_cast<int>(i)), x_[i]});
      total += x_[i];
    }
  }
  if (total < 1.0) support.push_back({ItemSet{}, 1.0 - total});
  return Lottery(std::move(support), price);
}

}  // namespace bm
