#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/itemset.hpp"

namespace bm {

// Table valuations are stored densely by subset bitmask.
inline constexpr int kMaxTableItems = 20;
// Buy-many best response sweeps all 2^n held-set states.
inline constexpr int kMaxDpItems = 16;
// Stationary-policy enumeration (closure / verification).
inline constexpr int kMaxPolicyItems = 4;

enum class ValuationKind { Table, Additive, UnitDemand, Xos };

std::string to_string(ValuationKind kind);

// A monotone set function with v(empty) = 0, in one of four encodings.
class Valuation {
 public:
  // Zero valuation on a single item; a safe placeholder.
  Valuation() : values_{0.0} {}

  // values indexed by bitmask (index = sum of 2^i over members); validated
  // for nonnegativity, v(empty)=0 and monotonicity under set inclusion.
  static Valuation table(int n, std::vector<double> values_by_mask);
  static Valuation additive(std::vector<double> item_values);
  static Valuation unit_demand(std::vector<double> item_values);
  static Valuation xos(int n, std::vector<std::vector<double>> clauses);

  double operator()(const ItemSet& s) const;
  double value_mask(std::uint32_t mask) const;

  int items() const { return n_; }
  ValuationKind kind() const { return kind_; }

  // Per-item or per-mask payload, depending on the kind.
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::vector<double>>& clauses() const { return clauses_; }

  // v evaluated on every mask 0..2^n-1 (n <= kMaxTableItems).
  std::vector<double> dense_table() const;

  // Same payload with every value multiplied by factor >= 0.
  Valuation scaled(double factor) const;

  bool operator==(const Valuation&) const = default;

 private:
  ValuationKind kind_ = ValuationKind::Additive;
  int n_ = 1;
  std::vector<double> values_;
  std::vector<std::vector<double>> clauses_;
};

// One menu option: a randomized allocation plus a price.
struct WeightedSet {
  ItemSet set;
  double prob = 0.0;

  bool operator==(const WeightedSet&) const = default;
  auto operator<=>(const WeightedSet&) const = default;
};

class Lottery {
 public:
  // Probabilities must be nonnegative and sum to 1 within tol; the empty
  // set may carry probability. Support is merged and canonically sorted.
  Lottery(std::vector<WeightedSet> allocation, double price, double tol = kTol);

  static Lottery null_lottery();
  static Lottery deterministic(const ItemSet& s, double price);

  const std::vector<WeightedSet>& support() const { return support_; }
  double price() const { return price_; }

  // Probability that the draw contains item i.
  double item_probability(int i) const;

  bool same_allocation(const Lottery& other, double tol = kTol) const;

  bool operator==(const Lottery&) const = default;

 private:
  std::vector<WeightedSet> support_;
  double price_ = 0.0;
};

double lottery_value(const Valuation& v, const Lottery& lot);
double utility(const Valuation& v, const Lottery& lot);

enum class Semantics { BuyOne, BuyMany };

std::string to_string(Semantics s);

// A finite list of priced lotteries. Entries with identical allocation
// distributions are collapsed to the minimum price. The null lottery is
// always implicitly available to the buyer and is not stored.
class Menu {
 public:
  Menu() = default;
  Menu(std::vector<Lottery> entries, Semantics semantics);

  const std::vector<Lottery>& entries() const { return entries_; }
  Semantics semantics() const { return semantics_; }
  std::size_t size() const { return entries_.size(); }

  Menu with_semantics(Semantics s) const;
  // All prices multiplied by factor >= 0; allocations untouched.
  Menu scaled_prices(double factor) const;

 private:
  std::vector<Lottery> entries_;
  Semantics semantics_ = Semantics::BuyOne;
};

// Finite discrete distribution over valuations, all on the same item count.
class TypeDistribution {
 public:
  struct Atom {
    double prob = 0.0;
    Valuation valuation;
  };

  TypeDistribution() = default;
  TypeDistribution(std::vector<Atom> atoms, double tol = kTol);

  const std::vector<Atom>& atoms() const { return atoms_; }
  int items() const { return n_; }
  bool all_unit_demand() const;

 private:
  std::vector<Atom> atoms_;
  int n_ = 0;
};

// Unit-demand view of an allocation: per-item probabilities with sum <= 1.
class MarginalAllocation {
 public:
  explicit MarginalAllocation(std::vector<double> per_item);

  // Requires the lottery's support to be singletons plus the empty set.
  static MarginalAllocation from_lottery(const Lottery& lot, int n);
  // Singleton support; leftover mass goes to the empty set.
  Lottery to_lottery(double price) const;

  const std::vector<double>& probabilities() const { return x_; }

 private:
  std::vector<double> x_;
};

// A full experiment input: item count, type distribution, menu.
struct Instance {
  int n = 0;
  TypeDistribution distribution;
  Menu menu;
};

}  // namespace bm
