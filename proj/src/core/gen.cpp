#include "core/gen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bm {

namespace {

ItemSet random_subset(int n, int s, std::mt19937_64& rng) {
  // Partial Fisher-Yates over item indices.
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  ItemSet out;
  for (int k = 0; k < s; ++k) {
    const std::size_t j = k + rng() % static_cast<std::size_t>(n - k);
    std::swap(pool[static_cast<std::size_t>(k)], pool[j]);
    out.insert(pool[static_cast<std::size_t>(k)]);
  }
  return out;
}

std::vector<double> sample_t_values(const HardFamilyParams& params, int count) {
  if (!params.t_values.empty()) {
    require(static_cast<int>(params.t_values.size()) == count,
            "hard family: t_values length must equal the atom count");
    for (double t : params.t_values) {
      require(t >= 1.0 && t <= params.value_cap + kTol,
              "hard family: every t must lie in [1, H]");
    }
    return params.t_values;
  }
  TruncatedGeometric dist(params.value_cap);
  std::mt19937_64 rng(params.seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<double> t(static_cast<std::size_t>(count));
  for (double& x : t) x = dist.sample(rng);
  return t;
}

}  // namespace

BasicSetSystem sample_basic_sets(int n, int s, int b, int count, std::uint64_t seed,
                                 std::uint64_t retry_budget) {
  require(n >= 1 && n <= ItemSet::kMaxItems, "basic sets: n out of range");
  require(s >= 1 && s <= n, "basic sets: set size must be in [1, n]");
  require(b >= 0, "basic sets: intersection bound must be nonnegative");
  require(count >= 1, "basic sets: count must be positive");

  BasicSetSystem sys;
  sys.n = n;
  sys.set_size = s;
  sys.max_overlap = b;
  std::mt19937_64 rng(seed);
  while (static_cast<int>(sys.sets.size()) < count) {
    if (sys.attempts >= retry_budget) {
      throw validation_error("basic sets: retry budget exhausted after " +
                             std::to_string(sys.attempts) + " attempts (" +
                             std::to_string(sys.sets.size()) + "/" + std::to_string(count) +
                             " sets found)");
    }
    ++sys.attempts;
    const ItemSet candidate = random_subset(n, s, rng);
    bool ok = true;
    for (const ItemSet& existing : sys.sets) {
      const int overlap = candidate.intersect(existing).count();
      if (overlap > b || candidate == existing) {
        ok = false;
        break;
      }
    }
    if (ok) sys.sets.push_back(candidate);
  }
  return sys;
}

CounterexampleInstance gen_counterexample(int n, double eps, double delta) {
  require(n >= 1 && n <= kMaxDpItems, "counterexample: n out of range");
  require(eps > 0.0 && eps * n > 1.0, "counterexample: needs eps * n > 1");
  require(delta > 0.0 && delta <= 1.0, "counterexample: delta must be in (0, 1]");

  CounterexampleInstance out;
  out.epsilon = eps;
  out.delta = delta;
  out.c = (1.0 + delta) / delta;

  std::vector<TypeDistribution::Atom> atoms, perturbed;
  double mass = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double scale = std::pow(out.c, k);
    const double prob = std::pow(out.c, -k);
    std::vector<double> values(static_cast<std::size_t>(n), scale / eps);
    std::vector<double> flat = values;
    values[static_cast<std::size_t>(k - 1)] = scale * (1.0 + eps) / eps;
    atoms.push_back({prob, Valuation::unit_demand(std::move(values))});
    perturbed.push_back({prob, Valuation::unit_demand(std::move(flat))});
    mass += prob;
  }
  const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
  atoms.push_back({1.0 - mass, Valuation::unit_demand(zeros)});
  perturbed.push_back({1.0 - mass, Valuation::unit_demand(zeros)});
  out.d = TypeDistribution(std::move(atoms));
  out.d_perturbed = TypeDistribution(std::move(perturbed));

  out.item_prices.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.item_prices[static_cast<std::size_t>(i)] = std::pow(out.c, i + 1);
  return out;
}

TruncatedGeometric::TruncatedGeometric(double h) : h_(h) {
  require(h >= 2.0, "truncated geometric: H must be at least 2");
  const double levels = std::log2(h);
  const int l = static_cast<int>(levels + 0.5);
  require(std::fabs(levels - l) <= 1e-9, "truncated geometric: H must be a power of two");
  const double norm = 1.0 - 1.0 / h;
  for (int a = 1; a <= l; ++a) {
    pmf_.emplace_back(std::pow(2.0, a), std::pow(2.0, -a) / norm);
  }
}

double TruncatedGeometric::mean() const {
  return std::log2(h_) / (1.0 - 1.0 / h_);
}

double TruncatedGeometric::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  for (const auto& [value, prob] : pmf_) {
    if (u <= prob) return value;
    u -= prob;
  }
  return pmf_.back().first;
}

HardInstance gen_hard_unit_demand(const HardFamilyParams& params) {
  require(params.value_cap >= 1.0, "hard unit-demand family: needs H >= 1");
  const double cross = params.value_cap * params.max_overlap / params.set_size;
  if (!(cross < 0.5)) {
    throw validation_error(
        "hard unit-demand family: validity violated, H*b/s = " + std::to_string(cross) +
        " must be < 1/2");
  }
  HardInstance out;
  out.sets = sample_basic_sets(params.n, params.set_size, params.max_overlap, params.count,
                               params.seed, params.retry_budget);
  out.t = sample_t_values(params, params.count);

  std::vector<TypeDistribution::Atom> atoms;
  std::vector<Lottery> entries;
  const double weight = 1.0 / params.count;
  for (int i = 0; i < params.count; ++i) {
    std::vector<double> values(static_cast<std::size_t>(params.n), 0.0);
    std::vector<WeightedSet> support;
    for (int item : out.sets.sets[static_cast<std::size_t>(i)].members()) {
      values[static_cast<std::size_t>(item)] = out.t[static_cast<std::size_t>(i)];
      support.push_back({ItemSet::single(item), 1.0 / params.set_size});
    }
    atoms.push_back({weight, Valuation::unit_demand(std::move(values))});
    entries.emplace_back(std::move(support), out.t[static_cast<std::size_t>(i)] / 2.0);
  }
  out.d = TypeDistribution(std::move(atoms));
  out.menu = Menu(std::move(entries), Semantics::BuyMany);
  return out;
}

HardInstance gen_hard_xos(const HardFamilyParams& params) {
  require(params.value_cap >= 1.0, "hard xos family: needs H >= 1");
  require(params.set_count >= params.collection_size,
          "hard xos family: needs at least collection_size basic sets");
  const double cross =
      params.value_cap * (static_cast<double>(params.collection_overlap) / params.collection_size +
                          static_cast<double>(params.max_overlap) / params.set_size);
  if (!(cross < 0.5)) {
    throw validation_error(
        "hard xos family: validity violated, H*(b'/m + b/s) = " + std::to_string(cross) +
        " must be < 1/2");
  }
  HardInstance out;
  out.sets = sample_basic_sets(params.n, params.set_size, params.max_overlap, params.set_count,
                               params.seed, params.retry_budget);
  // Second-level rejection sampling over basic-set indices.
  out.collections = sample_basic_sets(params.set_count, params.collection_size,
                                      params.collection_overlap, params.count, params.seed + 1,
                                      params.retry_budget);
  out.t = sample_t_values(params, params.count);

  std::vector<TypeDistribution::Atom> atoms;
  std::vector<Lottery> entries;
  const double weight = 1.0 / params.count;
  for (int i = 0; i < params.count; ++i) {
    std::vector<std::vector<double>> clauses;
    std::vector<WeightedSet> support;
    for (int set_index : out.collections.sets[static_cast<std::size_t>(i)].members()) {
      const ItemSet& basic = out.sets.sets[static_cast<std::size_t>(set_index)];
      std::vector<double> clause(static_cast<std::size_t>(params.n), 0.0);
      for (int item : basic.members()) {
        clause[static_cast<std::size_t>(item)] = out.t[static_cast<std::size_t>(i)] / params.set_size;
      }
      clauses.push_back(std::move(clause));
      support.push_back({basic, 1.0 / params.collection_size});
    }
    atoms.push_back({weight, Valuation::xos(params.n, std::move(clauses))});
    entries.emplace_back(std::move(support), out.t[static_cast<std::size_t>(i)] / 2.0);
  }
  out.d = TypeDistribution(std::move(atoms));
  out.menu = Menu(std::move(entries), Semantics::BuyMany);
  return out;
}

}  // namespace bm
