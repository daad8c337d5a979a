#include "buymany/buymany.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include <json.hpp>

#include "core/beta.hpp"
#include "core/buyer.hpp"
#include "core/compress.hpp"
#include "core/gen.hpp"
#include "core/io.hpp"
#include "core/lp.hpp"
#include "core/perturb.hpp"
#include "core/pricing.hpp"
#include "core/selftest.hpp"
#include "core/verify.hpp"

using nlohmann::json;

struct bm_instance {
  bm::Instance value;
};

namespace {

char* copy_string(const std::string& text) {
  char* out = new (std::nothrow) char[text.size() + 1];
  if (out) std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void set_error(char** error, const std::string& message) {
  if (error) *error = copy_string(message);
}

template <typename Fn>
bm_status guarded(char** error, Fn&& fn) {
  try {
    fn();
    return BM_OK;
  } catch (const bm::capacity_error& e) {
    set_error(error, e.what());
    return BM_ERR_CAPACITY;
  } catch (const bm::validation_error& e) {
    set_error(error, e.what());
    return BM_ERR_VALIDATION;
  } catch (const std::exception& e) {
    set_error(error, e.what());
    return BM_ERR_INTERNAL;
  }
}

json allocation_to_json(const std::vector<bm::WeightedSet>& allocation) {
  json out = json::array();
  for (const auto& ws : allocation) {
    out.push_back(json{{"set", ws.set.members()}, {"prob", ws.prob}});
  }
  return out;
}

json outcome_to_json(const bm::Outcome& outcome) {
  return json{{"allocation", allocation_to_json(outcome.final_allocation)},
              {"payment", outcome.expected_payment}};
}

json q_vector_to_json(const std::vector<double>& q) {
  json out = json::array();
  for (double x : q) {
    if (std::isfinite(x)) {
      out.push_back(x);
    } else {
      out.push_back(nullptr);  // item never allocated: infinite price
    }
  }
  return out;
}

bm::PerturbationSpec spec_from_json(const json& doc) {
  bm::require(doc.is_object(), "perturbation spec: expected an object");
  bm::require(doc.contains("epsilon") && doc["epsilon"].is_number(),
              "perturbation spec: missing numeric 'epsilon'");
  bm::PerturbationSpec spec;
  spec.epsilon = doc["epsilon"].get<double>();
  const std::string mode = doc.value("mode", std::string("random-items"));
  if (doc.contains("seed")) spec.seed = doc["seed"].get<std::uint64_t>();
  if (mode == "scalar") {
    spec.scalar_factors = doc.at("factors").get<std::vector<double>>();
  } else if (mode == "items") {
    spec.item_factors = doc.at("factors").get<std::vector<std::vector<double>>>();
  } else if (mode == "explicit") {
    const json& reps = doc.at("replacements");
    bm::require(reps.is_array(), "perturbation spec: 'replacements' must be an array");
    for (std::size_t i = 0; i < reps.size(); ++i) {
      spec.replacements.push_back(
          bm::valuation_from_json(reps[i], "$.replacements[" + std::to_string(i) + "]"));
    }
  } else if (mode == "random-scalar") {
    spec.randomize = true;
  } else if (mode == "random-items") {
    spec.randomize_items = true;
  } else {
    throw bm::validation_error("perturbation spec: unknown mode '" + mode + "'");
  }
  return spec;
}

json set_system_to_json(const bm::BasicSetSystem& sys) {
  json sets = json::array();
  for (const auto& s : sys.sets) sets.push_back(s.members());
  return json{{"n", sys.n},
              {"set_size", sys.set_size},
              {"max_overlap", sys.max_overlap},
              {"attempts", sys.attempts},
              {"sets", sets}};
}

json generate_counterexample(const json& params) {
  const int n = params.value("n", 4);
  const double eps = params.value("eps", 0.5);
  const double delta = params.value("delta", 1.0);
  const std::string variant = params.value("variant", std::string("base"));
  const bm::CounterexampleInstance cx = bm::gen_counterexample(n, eps, delta);

  bm::Instance inst;
  inst.n = n;
  inst.distribution = variant == "perturbed" ? cx.d_perturbed : cx.d;
  inst.menu = bm::expand_item_pricing(cx.item_prices);
  json doc = bm::save_instance(inst);
  doc["meta"] = json{{"family", "counterexample"}, {"variant", variant},
                     {"eps", eps},                 {"delta", delta},
                     {"c", cx.c},                  {"item_prices", cx.item_prices}};
  return doc;
}

bm::HardFamilyParams hard_params_from_json(const json& params) {
  bm::HardFamilyParams p;
  p.n = params.value("n", 12);
  p.set_size = params.value("s", 2);
  p.max_overlap = params.value("b", 0);
  p.count = params.value("count", 4);
  p.value_cap = params.value("h", 4.0);
  p.seed = params.value("seed", std::uint64_t{1});
  p.retry_budget = params.value("retry_budget", std::uint64_t{1'000'000});
  if (params.contains("t")) p.t_values = params["t"].get<std::vector<double>>();
  p.set_count = params.value("set_count", 4);
  p.collection_size = params.value("m", 2);
  p.collection_overlap = params.value("collection_overlap", 0);
  return p;
}

json generate_hard(const json& params, bool xos) {
  const bm::HardFamilyParams p = hard_params_from_json(params);
  const bm::HardInstance hard = xos ? bm::gen_hard_xos(p) : bm::gen_hard_unit_demand(p);
  bm::Instance inst{p.n, hard.d, hard.menu};
  json doc = bm::save_instance(inst);
  json meta{{"family", xos ? "hard-xos" : "hard-unitdemand"},
            {"t", hard.t},
            {"h", p.value_cap},
            {"seed", p.seed},
            {"sets", set_system_to_json(hard.sets)}};
  if (xos) meta["collections"] = set_system_to_json(hard.collections);
  doc["meta"] = std::move(meta);
  return doc;
}

json continuity_to_json(const bm::ContinuityReport& report) {
  json atoms = json::array();
  for (const auto& rec : report.atoms) {
    atoms.push_back(json{{"atom", rec.atom},
                         {"prob", rec.prob},
                         {"entry_before", rec.entry_before},
                         {"entry_after", rec.entry_after},
                         {"price_before", rec.price_before},
                         {"price_after", rec.price_after},
                         {"in_a", rec.in_a},
                         {"eq3_holds", rec.eq3_holds},
                         {"j_star", rec.j_star},
                         {"in_a_j", rec.in_a_j},
                         {"in_a_j_prime", rec.in_a_j_prime}});
  }
  return json{{"epsilon", report.epsilon},
              {"eps_prime", report.eps_prime},
              {"discount_applied", report.discount_applied},
              {"verify_checked", report.verify_checked},
              {"menu_verified", report.menu_verified},
              {"revenue_before", report.revenue_before},
              {"revenue_after", report.revenue_after},
              {"ratio", report.ratio},
              {"bound_factor", report.bound_factor},
              {"bound_value", report.bound_value},
              {"atoms", atoms}};
}

}  // namespace

extern "C" {

const char* bm_status_name(int status) {
  switch (status) {
    case BM_OK: return "ok";
    case BM_ERR_USAGE: return "usage";
    case BM_ERR_VALIDATION: return "validation";
    case BM_ERR_CAPACITY: return "capacity";
    case BM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void bm_string_free(char* text) { delete[] text; }

bm_status bm_instance_from_json(const char* text, double tolerance, bm_instance** out,
                                char** error) {
  if (!text || !out) {
    set_error(error, "bm_instance_from_json: null argument");
    return BM_ERR_USAGE;
  }
  *out = nullptr;
  return guarded(error, [&] {
    auto handle = std::make_unique<bm_instance>();
    handle->value = bm::load_instance_text(text, tolerance);
    *out = handle.release();
  });
}

void bm_instance_free(bm_instance* instance) { delete instance; }

bm_status bm_instance_to_json(const bm_instance* instance, char** out, char** error) {
  if (!instance || !out) {
    set_error(error, "bm_instance_to_json: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] { *out = copy_string(bm::save_instance(instance->value).dump(2)); });
}

int bm_instance_items(const bm_instance* instance) { return instance ? instance->value.n : 0; }

int bm_instance_atoms(const bm_instance* instance) {
  return instance ? static_cast<int>(instance->value.distribution.atoms().size()) : 0;
}

int bm_instance_menu_size(const bm_instance* instance) {
  return instance ? static_cast<int>(instance->value.menu.size()) : 0;
}

bm_status bm_revenue(const bm_instance* instance, int buy_many, double tolerance, double* out,
                     char** error) {
  if (!instance || !out) {
    set_error(error, "bm_revenue: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    *out = bm::revenue(instance->value.menu, instance->value.distribution,
                       buy_many ? bm::Semantics::BuyMany : bm::Semantics::BuyOne, tolerance);
  });
}

bm_status bm_best_response_report(const bm_instance* instance, int buy_many, double tolerance,
                                  char** out, char** error) {
  if (!instance || !out) {
    set_error(error, "bm_best_response_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    json atoms = json::array();
    double total = 0.0;
    for (std::size_t a = 0; a < inst.distribution.atoms().size(); ++a) {
      const auto& atom = inst.distribution.atoms()[a];
      const bm::BestResponse br =
          buy_many ? bm::buy_many_best_response(atom.valuation, inst.menu, tolerance)
                   : bm::buy_one_best_response(atom.valuation, inst.menu, tolerance);
      json rec{{"atom", a},
               {"prob", atom.prob},
               {"utility", br.utility},
               {"payment", br.outcome.expected_payment},
               {"outcome", outcome_to_json(br.outcome)}};
      if (buy_many && br.policy) {
        rec["first_action"] = br.policy->action(0);
        json actions = json::array();
        for (int act : br.policy->actions()) actions.push_back(act);
        rec["policy"] = actions;
        rec["chosen_entry"] = br.policy->action(0);
      } else {
        rec["chosen_entry"] = br.chosen_entry.value_or(-1);
      }
      atoms.push_back(std::move(rec));
      total += atom.prob * br.outcome.expected_payment;
    }
    json doc{{"semantics", buy_many ? "buymany" : "buyone"}, {"revenue", total}, {"atoms", atoms}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_verify_report(const bm_instance* instance, double tolerance, char** out,
                           char** error) {
  if (!instance || !out) {
    set_error(error, "bm_verify_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    const bm::VerifyResult result = bm::verify_buy_many(inst.menu, inst.n, tolerance);
    json doc{{"holds", result.holds}};
    if (!result.holds) {
      json actions = json::array();
      for (int act : result.witness->actions()) actions.push_back(act);
      doc["witness"] =
          json{{"policy", actions},
               {"payment", result.witness_outcome->expected_payment},
               {"allocation", allocation_to_json(result.witness_outcome->final_allocation)}};
    } else {
      doc["witness"] = nullptr;
    }
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_closure_report(const bm_instance* instance, double tolerance, char** out,
                            char** error) {
  if (!instance || !out) {
    set_error(error, "bm_closure_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    const bm::ClosureMenu cl = bm::closure(inst.menu, inst.n, tolerance);
    json entries = json::array();
    for (const auto& entry : cl.entries) {
      json actions = json::array();
      for (int act : entry.policy.actions()) actions.push_back(act);
      entries.push_back(json{{"payment", entry.outcome.expected_payment},
                             {"allocation", allocation_to_json(entry.outcome.final_allocation)},
                             {"policy", actions}});
    }
    json doc{{"entries", entries}, {"size", entries.size()}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_opt_buy_one_report(const bm_instance* instance, double tolerance, char** out,
                                char** error) {
  if (!instance || !out) {
    set_error(error, "bm_opt_buy_one_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    const bm::OptBuyOneResult opt = bm::opt_buy_one(inst.distribution, tolerance);
    json doc{{"revenue", opt.revenue},
             {"menu", bm::menu_to_json(opt.menu)},
             {"designated_entry", opt.designated_entry},
             {"prices", opt.prices},
             {"lp", json{{"variables", opt.lp_variables},
                         {"constraints", opt.lp_constraints},
                         {"iterations", opt.simplex_iterations},
                         {"arithmetic", opt.arithmetic}}}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_pricing_report(const bm_instance* instance, unsigned long long seed,
                            double tolerance, char** out, char** error) {
  if (!instance || !out) {
    set_error(error, "bm_pricing_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    const bm::PostedPrice bundle = bm::best_bundle_price(inst.distribution, tolerance);
    json singles = json::array();
    for (int i = 0; i < inst.n; ++i) {
      const bm::PostedPrice single = bm::best_single_item_price(inst.distribution, i, tolerance);
      singles.push_back(json{{"item", i}, {"price", single.price}, {"revenue", single.revenue}});
    }
    const bm::ItemPricingSearch search = bm::best_item_pricing(inst.distribution, seed, tolerance);
    json atoms = json::array();
    for (std::size_t a = 0; a < inst.distribution.atoms().size(); ++a) {
      const auto& atom = inst.distribution.atoms()[a];
      const std::uint32_t chosen = bm::item_pricing_choice(atom.valuation, search.prices, tolerance);
      atoms.push_back(
          json{{"atom", a},
               {"prob", atom.prob},
               {"bundle", bm::ItemSet::from_mask(chosen).members()},
               {"payment", bm::item_pricing_payment(atom.valuation, search.prices, tolerance)}});
    }
    json doc{{"best_bundle", json{{"price", bundle.price}, {"revenue", bundle.revenue}}},
             {"best_single_item", singles},
             {"best_item_pricing", json{{"prices", search.prices},
                                        {"revenue", search.revenue},
                                        {"exhaustive", search.exhaustive}}},
             {"atoms", atoms}};
    if (inst.menu.size() > 0) {
      const std::vector<double> q = bm::q_vector(inst.menu, inst.n);
      doc["q_vector"] = q_vector_to_json(q);
      doc["scaled_pricing_revenue"] = bm::scaled_pricing_revenue(
          q, inst.distribution, bm::AlphaDistribution::default_for(inst.n), tolerance);
    }
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_compress_report(const bm_instance* instance, double epsilon, double tolerance,
                             char** out, char** error) {
  if (!instance || !out) {
    set_error(error, "bm_compress_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const auto& inst = instance->value;
    auto [menu, report] = bm::compress(inst.menu, inst.distribution, epsilon, tolerance);
    json doc{{"epsilon", report.epsilon},
             {"delta", report.delta},
             {"effective_items", report.effective_items},
             {"meta", report.meta},
             {"input_entries", report.input_entries},
             {"after_drop_entries", report.after_drop_entries},
             {"output_entries", report.output_entries},
             {"size_bound_log2", report.size_bound_log2},
             {"size_bound_ok", report.size_bound_ok},
             {"input_revenue", report.input_revenue},
             {"output_revenue", report.output_revenue},
             {"target_factor", report.target_factor},
             {"menu", bm::menu_to_json(menu)}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_perturb_instance(const bm_instance* instance, const char* spec_json,
                              double tolerance, char** out, char** error) {
  if (!instance || !spec_json || !out) {
    set_error(error, "bm_perturb_instance: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    json spec_doc;
    try {
      spec_doc = json::parse(spec_json);
    } catch (const std::exception& e) {
      throw bm::validation_error(std::string("perturbation spec: invalid JSON: ") + e.what());
    }
    const bm::PerturbationSpec spec = spec_from_json(spec_doc);
    const bm::PerturbedPair pair = bm::perturb(instance->value.distribution, spec, tolerance);
    bm::Instance perturbed{instance->value.n, pair.perturbed, instance->value.menu};
    json doc = bm::save_instance(perturbed);
    doc["meta"] = json{{"perturbation_epsilon", spec.epsilon}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_continuity_report(const bm_instance* instance, double epsilon,
                               unsigned long long seed, double tolerance, char** out,
                               char** error) {
  if (!instance || !out) {
    set_error(error, "bm_continuity_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    bm::PerturbationSpec spec;
    spec.epsilon = epsilon;
    spec.randomize_items = true;
    spec.seed = seed;
    const bm::ContinuityReport report = bm::run_continuity_experiment(
        instance->value.distribution, instance->value.menu, spec, tolerance);
    *out = copy_string(continuity_to_json(report).dump(2));
  });
}

bm_status bm_generate(const char* family, const char* params_json, char** out, char** error) {
  if (!family || !out) {
    set_error(error, "bm_generate: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    json params = json::object();
    if (params_json && params_json[0] != '\0') {
      try {
        params = json::parse(params_json);
      } catch (const std::exception& e) {
        throw bm::validation_error(std::string("generate params: invalid JSON: ") + e.what());
      }
    }
    const std::string name = family;
    json doc;
    if (name == "counterexample") {
      doc = generate_counterexample(params);
    } else if (name == "basic-sets") {
      const bm::BasicSetSystem sys = bm::sample_basic_sets(
          params.value("n", 16), params.value("s", 4), params.value("b", 2),
          params.value("count", 8), params.value("seed", std::uint64_t{1}),
          params.value("retry_budget", std::uint64_t{1'000'000}));
      doc = set_system_to_json(sys);
    } else if (name == "hard-unitdemand") {
      doc = generate_hard(params, false);
    } else if (name == "hard-xos") {
      doc = generate_hard(params, true);
    } else {
      throw bm::validation_error("generate: unknown family '" + name + "'");
    }
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_beta_report(double grid_step, long long quadrature_points, char** out,
                         char** error) {
  if (!out) {
    set_error(error, "bm_beta_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const bm::beta::VerifyReport verify = bm::beta::verify_buy_many(grid_step);
    const bm::beta::RevenueReport rev =
        bm::beta::revenue_convergence(quadrature_points, quadrature_points * 100);
    json samples = json::array();
    const std::pair<double, double> probes[] = {{0.9, 0.9}, {0.01, 0.99}, {0.1, 0.1}};
    for (const auto& [v1, v2] : probes) {
      const bm::beta::MenuOutcome o = bm::beta::outcome(v1, v2);
      samples.push_back(json{{"v1", v1},
                             {"v2", v2},
                             {"region", bm::beta::to_string(o.region)},
                             {"alloc", {o.alloc1, o.alloc2}},
                             {"price", o.price}});
    }
    json doc{{"constants", json{{"x0", bm::beta::kX0}, {"p_star", bm::beta::kPStar}}},
             {"verify", json{{"grid_step", verify.grid_step},
                             {"checked", verify.checked},
                             {"min_margin", verify.min_margin},
                             {"max_alloc", verify.max_alloc},
                             {"worst_case_payment", verify.worst_case_payment},
                             {"holds", verify.holds}}},
             {"revenue", json{{"coarse", rev.coarse},
                              {"fine", rev.fine},
                              {"difference", rev.difference},
                              {"coarse_points", rev.coarse_points},
                              {"fine_points", rev.fine_points}}},
             {"samples", samples}};
    *out = copy_string(doc.dump(2));
  });
}

bm_status bm_selftest_report(unsigned long long seed, char** out, char** error) {
  if (!out) {
    set_error(error, "bm_selftest_report: null argument");
    return BM_ERR_USAGE;
  }
  return guarded(error, [&] {
    const bm::SelfTestResult result = bm::run_selftest(seed);
    json doc{{"checks", result.checks}, {"failures", result.failures}, {"ok", result.ok()}};
    *out = copy_string(doc.dump(2));
  });
}

}  // extern "C"
