#include "core/compress.hpp"

#include <algorithm>
#include <map>

#include "core/pricing.hpp"

namespace bm {

namespace {

// Per-item coordinate view x_i = Pr[i in draw] of a menu entry; the joint
// allocation rides along so on-grid entries (item pricings, deterministic
// bundles) pass through the pipeline untouched.
struct CoordEntry {
  std::vector<double> x;
  std::vector<WeightedSet> allocation;
  double price = 0.0;
};

std::vector<double> round_coords(const std::vector<double>& x, double step) {
  std::vector<double> rounded(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) rounded[i] = std::floor(x[i] / step + 1e-9) * step;
  }
  return rounded;
}

std::vector<CoordEntry> drop_small_coords(const std::vector<CoordEntry>& entries, double delta,
                                          double discount) {
  std::vector<CoordEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    bool keep = true;
    for (double x : e.x) {
      if (x > 0.0 && x < delta - 1e-12) {
        keep = false;
        break;
      }
    }
    if (keep) out.push_back({e.x, e.allocation, e.price * discount});
  }
  return out;
}

bool singleton_support(const std::vector<WeightedSet>& allocation) {
  return std::all_of(allocation.begin(), allocation.end(),
                     [](const WeightedSet& ws) { return ws.set.count() <= 1; });
}

std::vector<WeightedSet> allocation_from_coords(const std::vector<double>& x) {
  std::vector<WeightedSet> out;
  double mass = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) {
      out.push_back({ItemSet::single(static_cast<int>(i)), x[i]});
      mass += x[i];
    }
  }
  require(mass <= 1.0 + kTol, "compression: rounded marginals exceed total mass 1");
  if (mass < 1.0) out.push_back({ItemSet{}, 1.0 - mass});
  return out;
}

std::vector<CoordEntry> grid_round_coords(const std::vector<CoordEntry>& entries, double step,
                                          double discount) {
  std::vector<CoordEntry> rounded_entries;
  rounded_entries.reserve(entries.size());
  for (const auto& e : entries) {
    CoordEntry out;
    out.x = round_coords(e.x, step);
    out.price = e.price * discount;
    if (out.x == e.x) {
      out.allocation = e.allocation;  // already on-grid, keep the joint
    } else if (singleton_support(e.allocation)) {
      out.allocation = allocation_from_coords(out.x);
    } else {
      throw validation_error(
          "compression: cannot grid-round an off-grid entry with non-singleton support");
    }
    rounded_entries.push_back(std::move(out));
  }
  // Collapse identical allocations to the minimum price.
  std::map<std::vector<WeightedSet>, std::size_t> seen;
  std::vector<CoordEntry> out;
  for (auto& e : rounded_entries) {
    auto [it, inserted] = seen.try_emplace(e.allocation, out.size());
    if (inserted) {
      out.push_back(std::move(e));
    } else {
      out[it->second].price = std::min(out[it->second].price, e.price);
    }
  }
  return out;
}

// Meta coordinates are the joint distribution itself; rounding and
// deduplication act on the coordinate vectors directly.
std::vector<CoordEntry> grid_round_meta_coords(const std::vector<CoordEntry>& entries,
                                               double step, double discount) {
  std::map<std::vector<double>, double> dedup;
  for (const auto& e : entries) {
    auto rounded = round_coords(e.x, step);
    const double price = e.price * discount;
    auto [it, inserted] = dedup.try_emplace(std::move(rounded), price);
    if (!inserted) it->second = std::min(it->second, price);
  }
  std::vector<CoordEntry> out;
  out.reserve(dedup.size());
  for (auto& [coords, price] : dedup) out.push_back({coords, {}, price});
  return out;
}

std::vector<CoordEntry> menu_to_marginals(const Menu& menu, int n) {
  std::vector<CoordEntry> out;
  out.reserve(menu.size());
  for (const auto& lot : menu.entries()) {
    CoordEntry e;
    e.x.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) e.x[static_cast<std::size_t>(i)] = lot.item_probability(i);
    e.allocation = lot.support();
    e.price = lot.price();
    out.push_back(std::move(e));
  }
  return out;
}

Menu marginals_to_menu(const std::vector<CoordEntry>& entries, Semantics semantics, double tol) {
  std::vector<Lottery> lots;
  lots.reserve(entries.size());
  for (const auto& e : entries) {
    lots.emplace_back(e.allocation, e.price, tol);
  }
  return Menu(std::move(lots), semantics);
}

// Meta-item coordinates: one marginal per nonempty subset mask.
std::vector<CoordEntry> menu_to_meta(const Menu& menu, int n) {
  const std::size_t coords = (std::size_t{1} << n) - 1;
  std::vector<CoordEntry> out;
  out.reserve(menu.size());
  for (const auto& lot : menu.entries()) {
    CoordEntry e;
    e.x.assign(coords, 0.0);
    e.price = lot.price();
    for (const auto& ws : lot.support()) {
      if (!ws.set.empty()) e.x[ws.set.mask() - 1] += ws.prob;
    }
    out.push_back(std::move(e));
  }
  return out;
}

Menu meta_to_menu(const std::vector<CoordEntry>& entries, Semantics semantics, double tol) {
  std::vector<Lottery> lots;
  lots.reserve(entries.size());
  for (const auto& e : entries) {
    std::vector<WeightedSet> support;
    double mass = 0.0;
    for (std::size_t c = 0; c < e.x.size(); ++c) {
      if (e.x[c] > 0.0) {
        support.push_back({ItemSet::from_mask(static_cast<std::uint32_t>(c + 1)), e.x[c]});
        mass += e.x[c];
      }
    }
    if (mass < 1.0) support.push_back({ItemSet{}, 1.0 - mass});
    lots.emplace_back(std::move(support), e.price, tol);
  }
  return Menu(std::move(lots), semantics);
}

CompressReport finish_report(CompressReport report, const Menu& in, const Menu& out,
                             const TypeDistribution& d, double tol) {
  report.input_entries = in.size();
  report.output_entries = out.size();
  report.size_bound_log2 =
      report.effective_items * std::log2(1.0 + 1.0 / (report.delta * report.delta));
  report.size_bound_ok =
      std::log2(static_cast<double>(std::max<std::size_t>(out.size(), 1))) <=
      report.size_bound_log2 + 1e-9;
  report.input_revenue = revenue(in, d, Semantics::BuyMany, tol);
  report.output_revenue = revenue(out, d, Semantics::BuyMany, tol);
  report.target_factor = 1.0 - 4.0 * std::sqrt(report.epsilon);
  return report;
}

}  // namespace

double CompressionParams::delta() const {
  const double m = static_cast<double>(effective_items);
  return epsilon * epsilon * epsilon / (m * m * m);
}

double CompressionParams::grid_step() const {
  const double d = delta();
  return d * d;
}

CompressionParams make_compression_params(double epsilon, int effective_items) {
  require(epsilon > 0.0 && epsilon < 1.0, "compression: eps must be in (0, 1)");
  require(effective_items >= 1, "compression: needs at least one item");
  CompressionParams p{epsilon, effective_items};
  require(p.delta() > 0.0 && p.grid_step() > 0.0, "compression: degenerate grid");
  return p;
}

Menu drop_small(const Menu& menu, const CompressionParams& params, double tol) {
  auto entries = drop_small_coords(menu_to_marginals(menu, params.effective_items),
                                   params.delta(), params.keep_discount());
  return marginals_to_menu(entries, menu.semantics(), tol);
}

Menu grid_round(const Menu& menu, const CompressionParams& params, double tol) {
  auto entries = grid_round_coords(menu_to_marginals(menu, params.effective_items),
                                   params.grid_step(), params.round_discount());
  return marginals_to_menu(entries, menu.semantics(), tol);
}

std::pair<Menu, CompressReport> compress(const Menu& menu, const TypeDistribution& d,
                                         double epsilon, double tol) {
  if (!d.all_unit_demand()) return meta_item_compress(menu, d, epsilon, tol);
  const CompressionParams params = make_compression_params(epsilon, d.items());

  CompressReport report;
  report.epsilon = epsilon;
  report.delta = params.delta();
  report.effective_items = params.effective_items;

  auto coords = menu_to_marginals(menu, d.items());
  auto kept = drop_small_coords(coords, params.delta(), params.keep_discount());
  report.after_drop_entries = kept.size();
  auto rounded = grid_round_coords(kept, params.grid_step(), params.round_discount());
  Menu out = marginals_to_menu(rounded, menu.semantics(), tol);
  report = finish_report(std::move(report), menu, out, d, tol);
  return {std::move(out), report};
}

std::pair<Menu, CompressReport> meta_item_compress(const Menu& menu, const TypeDistribution& d,
                                                   double epsilon, double tol) {
  require_capacity(d.items() <= kMaxPolicyItems,
                   "meta-item compression: capacity is 4 items (16 meta items)");
  const int meta_items = 1 << d.items();
  const CompressionParams params = make_compression_params(epsilon, meta_items);

  CompressReport report;
  report.epsilon = epsilon;
  report.delta = params.delta();
  report.effective_items = meta_items;
  report.meta = true;

  auto coords = menu_to_meta(menu, d.items());
  auto kept = drop_small_coords(coords, params.delta(), params.keep_discount());
  report.after_drop_entries = kept.size();
  auto rounded = grid_round_meta_coords(kept, params.grid_step(), params.round_discount());
  Menu out = meta_to_menu(rounded, menu.semantics(), tol);
  report = finish_report(std::move(report), menu, out, d, tol);
  return {std::move(out), report};
}

}  // namespace bm
