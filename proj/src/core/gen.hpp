#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "core/model.hpp"

namespace bm {

// Collection of equal-size item sets with bounded pairwise intersections.
struct BasicSetSystem {
  int n = 0;
  int set_size = 0;
  int max_overlap = 0;
  std::vector<ItemSet> sets;
  std::uint64_t attempts = 0;
};

// Rejection sampling of size-s subsets of [n]; a draw is kept only if it
// intersects every accepted set in at most b items. Deterministic under
// seed; throws once retry_budget draws have been spent.
BasicSetSystem sample_basic_sets(int n, int s, int b, int count, std::uint64_t seed,
                                 std::uint64_t retry_budget = 1'000'000);

// The revenue-discontinuity family: unit-demand atoms v^(k) with peak value
// (1+eps)/eps * c^k on item k and 1/eps * c^k elsewhere, c = (1+delta)/delta,
// atom probability c^-k, plus the residual zero valuation. The perturbed
// twin flattens each atom to 1/eps * c^k everywhere; the emitted item
// pricing charges c^(i+1) for item i (0-based).
struct CounterexampleInstance {
  TypeDistribution d;
  TypeDistribution d_perturbed;
  double epsilon = 0.0;
  double delta = 0.0;
  double c = 0.0;
  std::vector<double> item_prices;
};

CounterexampleInstance gen_counterexample(int n, double eps, double delta);

// Values 2^a with probability 2^-a / (1 - 1/H), a = 1..log2(H); H must be a
// power of two, at least 2.
class TruncatedGeometric {
 public:
  explicit TruncatedGeometric(double h);

  const std::vector<std::pair<double, double>>& pmf() const { return pmf_; }
  double mean() const;
  double sample(std::mt19937_64& rng) const;

 private:
  double h_ = 2.0;
  std::vector<std::pair<double, double>> pmf_;  // (value, probability)
};

struct HardFamilyParams {
  int n = 0;
  int set_size = 0;     // s
  int max_overlap = 0;  // b
  int count = 0;        // number of atoms (N for unit-demand, collections for xos)
  double value_cap = 2.0;  // H
  std::uint64_t seed = 1;
  std::uint64_t retry_budget = 1'000'000;
  std::vector<double> t_values;  // optional; sampled when empty

  // xos only: the second-level system of basic-set collections.
  int set_count = 0;          // ground basic sets to sample
  int collection_size = 2;    // m
  int collection_overlap = 0; // max shared basic sets between two collections
};

struct HardInstance {
  TypeDistribution d;
  Menu menu;  // entry i designated for atom i, priced t_i / 2
  std::vector<double> t;
  BasicSetSystem sets;
  BasicSetSystem collections;  // xos only; sets live on the basic-set indices
};

// Unit-demand hard family: atom i values every item of S_i at t_i; entry i
// draws a uniform item of S_i at price t_i/2. Valid only when H >= 1 and
// H*b/s < 1/2, which makes every cross purchase strictly unprofitable.
HardInstance gen_hard_unit_demand(const HardFamilyParams& params);

// XOS hard family: atom i has one additive clause of weight t_i/s on each
// set of its collection; entry i draws a uniform set of the collection at
// price t_i/2. Valid when H >= 1 and H*(b'/m + b/s) < 1/2.
HardInstance gen_hard_xos(const HardFamilyParams& params);

}  // namespace bm
