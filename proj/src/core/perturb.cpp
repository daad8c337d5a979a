#include "core/perturb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "core/buyer.hpp"
#include "core/pricing.hpp"
#include "core/verify.hpp"

namespace bm {

namespace {

Valuation apply_item_factors(const Valuation& v, const std::vector<double>& factors) {
  require(static_cast<int>(factors.size()) == v.items(),
          "perturb: item factor vector length must equal n");
  switch (v.kind()) {
    case ValuationKind::Additive: {
      std::vector<double> vals = v.values();
      for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= factors[i];
      return Valuation::additive(std::move(vals));
    }
    case ValuationKind::UnitDemand: {
      std::vector<double> vals = v.values();
      for (std::size_t i = 0; i < vals.size(); ++i) vals[i] *= factors[i];
      return Valuation::unit_demand(std::move(vals));
    }
    case ValuationKind::Xos: {
      std::vector<std::vector<double>> clauses = v.clauses();
      for (auto& clause : clauses) {
        for (std::size_t i = 0; i < clause.size(); ++i) clause[i] *= factors[i];
      }
      return Valuation::xos(v.items(), std::move(clauses));
    }
    case ValuationKind::Table:
      throw validation_error(
          "perturb: per-item factors cannot perturb a table valuation; supply "
          "explicit replacement atoms instead");
  }
  throw validation_error("perturb: unknown valuation kind");
}

void check_factor(double f, double eps) {
  require(f >= 1.0 - eps - kTol && f <= 1.0 + eps + kTol,
          "perturb: multiplier " + std::to_string(f) + " outside [1-eps, 1+eps]");
}

}  // namespace

PerturbedPair perturb(const TypeDistribution& d, const PerturbationSpec& spec, double tol) {
  require(spec.epsilon > 0.0 && spec.epsilon < 1.0, "perturb: eps must be in (0, 1)");
  const std::size_t atoms = d.atoms().size();
  int modes = 0;
  modes += spec.scalar_factors.empty() ? 0 : 1;
  modes += spec.item_factors.empty() ? 0 : 1;
  modes += spec.replacements.empty() ? 0 : 1;
  modes += spec.randomize ? 1 : 0;
  modes += spec.randomize_items ? 1 : 0;
  require(modes == 1, "perturb: exactly one construction mode must be set");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unif(1.0 - spec.epsilon, 1.0 + spec.epsilon);

  std::vector<TypeDistribution::Atom> out;
  out.reserve(atoms);
  for (std::size_t a = 0; a < atoms; ++a) {
    const auto& atom = d.atoms()[a];
    Valuation v = atom.valuation;
    if (!spec.scalar_factors.empty()) {
      require(spec.scalar_factors.size() == atoms, "perturb: need one scalar factor per atom");
      check_factor(spec.scalar_factors[a], spec.epsilon);
      v = v.scaled(spec.scalar_factors[a]);
    } else if (!spec.item_factors.empty()) {
      require(spec.item_factors.size() == atoms, "perturb: need one factor vector per atom");
      for (double f : spec.item_factors[a]) check_factor(f, spec.epsilon);
      v = apply_item_factors(v, spec.item_factors[a]);
    } else if (!spec.replacements.empty()) {
      require(spec.replacements.size() == atoms, "perturb: need one replacement per atom");
      v = spec.replacements[a];
    } else if (spec.randomize) {
      v = v.scaled(unif(rng));
    } else {
      std::vector<double> factors(static_cast<std::size_t>(d.items()));
      for (double& f : factors) f = unif(rng);
      v = apply_item_factors(v, factors);
    }
    out.push_back({atom.prob, std::move(v)});
  }
  PerturbedPair pair{TypeDistribution(std::move(out), tol), spec.epsilon};
  validate_perturbation(d, pair.perturbed, spec.epsilon, tol);
  return pair;
}

void validate_perturbation(const TypeDistribution& d, const TypeDistribution& d_perturbed,
                           double eps, double tol) {
  require(eps > 0.0 && eps <= 1.0, "perturbation check: eps must be in (0, 1]");
  require(d.atoms().size() == d_perturbed.atoms().size(),
          "perturbation check: atom counts differ (coupling is by index)");
  require(d.items() == d_perturbed.items(), "perturbation check: item counts differ");
  require(d.items() <= kMaxTableItems, "perturbation check: exhaustive check capacity is 20 items");
  for (std::size_t a = 0; a < d.atoms().size(); ++a) {
    require(std::fabs(d.atoms()[a].prob - d_perturbed.atoms()[a].prob) <= tol,
            "perturbation check: atom " + std::to_string(a) + " probability differs");
    const auto before = d.atoms()[a].valuation.dense_table();
    const auto after = d_perturbed.atoms()[a].valuation.dense_table();
    for (std::size_t s = 0; s < before.size(); ++s) {
      const double lo = (1.0 - eps) * before[s] - tol;
      const double hi = (1.0 + eps) * before[s] + tol;
      if (after[s] < lo || after[s] > hi) {
        throw validation_error("perturbation check: atom " + std::to_string(a) + ", set mask " +
                               std::to_string(s) + ": value " + std::to_string(after[s]) +
                               " outside the (1 +- eps) sandwich of " + std::to_string(before[s]));
      }
    }
  }
}

double epsilon_prime(double eps, int n) {
  require(eps > 0.0 && n >= 1, "epsilon_prime: needs eps > 0 and n >= 1");
  const double log_factor = std::max(std::log2(static_cast<double>(n)), 1.0);
  return std::pow(eps, 1.0 / 6.0) * std::sqrt(static_cast<double>(n)) *
         std::pow(log_factor, 1.0 / 6.0);
}

Menu discount_menu(const Menu& menu, double eps_prime) {
  require(eps_prime >= 0.0 && eps_prime < 1.0, "discount_menu: eps_prime must be in [0, 1)");
  return menu.scaled_prices(1.0 - eps_prime);
}

ContinuityReport classify_switchers(const Menu& menu, const Menu& discounted,
                                    const TypeDistribution& d, const TypeDistribution& d_perturbed,
                                    double eps, double eps_prime, double tol) {
  require(menu.size() == discounted.size(),
          "classify: menus must pair up entry-by-entry (same allocations)");
  require(d.atoms().size() == d_perturbed.atoms().size(),
          "classify: distributions must couple by atom index");
  ContinuityReport report;
  report.epsilon = eps;
  report.eps_prime = eps_prime;

  const int n = d.items();
  const std::vector<double> q = q_vector(menu, n);
  const AlphaDistribution alpha = AlphaDistribution::default_for(n);
  const double log2n = std::log2(2.0 * n);
  const ItemSet all_items = ItemSet::full(n);

  for (std::size_t a = 0; a < d.atoms().size(); ++a) {
    const Valuation& v = d.atoms()[a].valuation;
    const Valuation& vp = d_perturbed.atoms()[a].valuation;
    const BestResponse before = buy_one_best_response(v, menu, tol);
    const BestResponse after = buy_one_best_response(vp, discounted, tol);

    ContinuityAtomRecord rec;
    rec.atom = static_cast<int>(a);
    rec.prob = d.atoms()[a].prob;
    rec.entry_before = before.chosen_entry.value_or(-1);
    rec.entry_after = after.chosen_entry.value_or(-1);
    rec.price_before =
        rec.entry_before >= 0 ? menu.entries()[static_cast<std::size_t>(rec.entry_before)].price() : 0.0;
    // Pre-discount price of the entry bought in the discounted menu.
    rec.price_after =
        rec.entry_after >= 0 ? menu.entries()[static_cast<std::size_t>(rec.entry_after)].price() : 0.0;
    rec.in_a = rec.price_after < (1.0 - eps_prime) * rec.price_before - tol;

    if (rec.in_a) {
      const double threshold_value = eps_prime * eps_prime / (2.0 * eps) * rec.price_before;
      rec.eq3_holds = v(all_items) + tol >= threshold_value;

      // Highest-priced item the buyer ever takes under the scaled pricings.
      std::vector<double> scaled(q.size());
      for (const auto& [factor, weight] : alpha.points) {
        (void)weight;
        for (std::size_t i = 0; i < q.size(); ++i) scaled[i] = factor * q[i];
        const std::uint32_t chosen = item_pricing_choice(v, scaled, tol);
        for (std::uint32_t bits = chosen; bits; bits &= bits - 1) {
          const int item = std::countr_zero(bits);
          if (rec.j_star < 0 || q[static_cast<std::size_t>(item)] >
                                     q[static_cast<std::size_t>(rec.j_star)]) {
            rec.j_star = item;
          }
        }
      }
      if (rec.j_star >= 0) {
        const double threshold =
            std::sqrt(n * eps_prime * eps_prime / (2.0 * eps * log2n)) * rec.price_before;
        rec.in_a_j = q[static_cast<std::size_t>(rec.j_star)] > threshold;
        rec.in_a_j_prime = !rec.in_a_j;
      }
    }
    report.atoms.push_back(rec);
  }
  return report;
}

ContinuityReport run_continuity_experiment(const TypeDistribution& d, const Menu& menu,
                                           const PerturbationSpec& spec, double tol) {
  const int n = d.items();
  const double eps = spec.epsilon;
  const double ep = epsilon_prime(eps, n);

  PerturbedPair pair = perturb(d, spec, tol);

  ContinuityReport report;
  if (ep < 1.0) {
    const Menu discounted = discount_menu(menu, ep);
    report = classify_switchers(menu, discounted, d, pair.perturbed, eps, ep, tol);
    report.discount_applied = true;
    report.revenue_before = revenue(menu, d, Semantics::BuyMany, tol);
    report.revenue_after = revenue(discounted, pair.perturbed, Semantics::BuyMany, tol);
  } else {
    // The proof's discount degenerates; report undiscounted revenues.
    report = classify_switchers(menu, menu, d, pair.perturbed, eps, ep, tol);
    report.discount_applied = false;
    report.revenue_before = revenue(menu, d, Semantics::BuyMany, tol);
    report.revenue_after = revenue(menu, pair.perturbed, Semantics::BuyMany, tol);
  }
  report.ratio = report.revenue_before > 0.0 ? report.revenue_after / report.revenue_before : 1.0;
  const double shrink = 2.0 * n * std::sqrt(8.0 * eps * n * std::log2(2.0 * n)) / ep;
  report.bound_factor = (1.0 - ep) * (1.0 - ep) * (1.0 - shrink);
  report.bound_value = report.bound_factor * report.revenue_before;

  if (n <= kMaxPolicyItems && menu.size() <= 64) {
    report.verify_checked = true;
    try {
      report.menu_verified = verify_buy_many(menu, n, tol).holds;
    } catch (const capacity_error&) {
      report.verify_checked = false;
    }
  }
  return report;
}

}  // namespace bm
