// Command-line front end for the buy-many laboratory. All functionality goes
// through the shared-library C API; this tool only handles flags, files and
// CSV formatting of the JSON reports.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "buymany/buymany.h"

namespace {

using nlohmann::json;

struct StringGuard {
  char* text = nullptr;
  ~StringGuard() { bm_string_free(text); }
};

struct InstanceGuard {
  bm_instance* handle = nullptr;
  ~InstanceGuard() { bm_instance_free(handle); }
};

struct CommonFlags {
  std::string instance_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_instance) {
  auto* opt = cmd->add_option("--instance", flags.instance_path, "instance document (JSON)");
  if (needs_instance) opt->required();
  cmd->add_option("--out", flags.out_path, "output file (default: stdout)");
  cmd->add_option("--format", flags.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--tolerance", flags.tolerance, "absolute comparison tolerance");
}

int report_error(int status, const char* message) {
  std::cerr << "error (" << bm_status_name(status) << "): " << (message ? message : "unknown")
            << "\n";
  return status;
}

int read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error (validation): cannot read " << path << "\n";
    return BM_ERR_VALIDATION;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  text = buffer.str();
  return BM_OK;
}

int write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << "\n";
    return BM_OK;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error (validation): cannot write " << out_path << "\n";
    return BM_ERR_VALIDATION;
  }
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
  return BM_OK;
}

int load_instance(const CommonFlags& flags, InstanceGuard& guard) {
  std::string text;
  if (int rc = read_file(flags.instance_path, text); rc != BM_OK) return rc;
  StringGuard error;
  const bm_status rc = bm_instance_from_json(text.c_str(), flags.tolerance, &guard.handle,
                                             &error.text);
  if (rc != BM_OK) return report_error(rc, error.text);
  return BM_OK;
}

std::string join_items(const json& items) {
  std::string out;
  for (const auto& item : items) {
    if (!out.empty()) out += "+";
    out += std::to_string(item.get<int>());
  }
  return out;
}

std::string csv_best_response(const json& doc) {
  std::ostringstream csv;
  csv << "atom,prob,chosen_entry,utility,payment\n";
  for (const auto& rec : doc["atoms"]) {
    csv << rec["atom"] << "," << rec["prob"].dump() << "," << rec["chosen_entry"] << ","
        << rec["utility"].dump() << "," << rec["payment"].dump() << "\n";
  }
  return csv.str();
}

std::string csv_pricing_atoms(const json& doc) {
  std::ostringstream csv;
  csv << "atom,prob,bundle,payment\n";
  for (const auto& rec : doc["atoms"]) {
    csv << rec["atom"] << "," << rec["prob"].dump() << "," << join_items(rec["bundle"]) << ","
        << rec["payment"].dump() << "\n";
  }
  return csv.str();
}

std::string csv_continuity(const json& doc) {
  std::ostringstream csv;
  csv << "atom,prob,entry_before,entry_after,price_before,price_after,in_a,eq3_holds,j_star,"
         "in_a_j,in_a_j_prime\n";
  for (const auto& rec : doc["atoms"]) {
    csv << rec["atom"] << "," << rec["prob"].dump() << "," << rec["entry_before"] << ","
        << rec["entry_after"] << "," << rec["price_before"].dump() << ","
        << rec["price_after"].dump() << "," << rec["in_a"] << "," << rec["eq3_holds"] << ","
        << rec["j_star"] << "," << rec["in_a_j"] << "," << rec["in_a_j_prime"] << "\n";
  }
  return csv.str();
}

int emit_report(const CommonFlags& flags, const char* text,
                std::string (*to_csv)(const json&) = nullptr) {
  if (flags.format == "csv") {
    if (!to_csv) {
      std::cerr << "error (usage): this subcommand has no CSV form\n";
      return BM_ERR_USAGE;
    }
    return write_output(to_csv(json::parse(text)), flags.out_path);
  }
  return write_output(text, flags.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"buy-many mechanism laboratory"};
  app.require_subcommand(1);

  CommonFlags flags;

  // revenue
  auto* revenue_cmd = app.add_subcommand("revenue", "expected revenue of the instance menu");
  std::string semantics = "buymany";
  add_common(revenue_cmd, flags, true);
  revenue_cmd->add_option("--semantics", semantics, "buyone or buymany")
      ->check(CLI::IsMember({"buyone", "buymany"}));

  // bestresponse
  auto* br_cmd = app.add_subcommand("bestresponse", "per-atom best responses");
  add_common(br_cmd, flags, true);
  br_cmd->add_option("--semantics", semantics, "buyone or buymany")
      ->check(CLI::IsMember({"buyone", "buymany"}));

  // verify / closure
  auto* verify_cmd = app.add_subcommand("verify", "check the buy-many constraint");
  add_common(verify_cmd, flags, true);
  auto* closure_cmd = app.add_subcommand("closure", "induced buy-one menu of the mechanism");
  add_common(closure_cmd, flags, true);

  // lp-opt
  auto* lp_cmd = app.add_subcommand("lp-opt", "optimal buy-one mechanism via LP");
  add_common(lp_cmd, flags, true);

  // pricing
  auto* pricing_cmd = app.add_subcommand("pricing", "posted-price optimizers and diagnostics");
  add_common(pricing_cmd, flags, true);

  // compress
  auto* compress_cmd = app.add_subcommand("compress", "finite-menu approximation pipeline");
  double epsilon = 0.5;
  add_common(compress_cmd, flags, true);
  compress_cmd->add_option("--eps", epsilon, "approximation parameter in (0,1)")->required();

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "multiplicative perturbation of the types");
  std::string spec_path;
  double perturb_eps = 0.0;
  std::string perturb_mode = "random-items";
  add_common(perturb_cmd, flags, true);
  perturb_cmd->add_option("--spec", spec_path, "perturbation spec file (JSON)");
  perturb_cmd->add_option("--eps", perturb_eps, "epsilon for seeded random perturbation");
  perturb_cmd->add_option("--mode", perturb_mode, "random-scalar or random-items")
      ->check(CLI::IsMember({"random-scalar", "random-items"}));

  // continuity
  auto* continuity_cmd =
      app.add_subcommand("continuity", "revenue-continuity experiment on the instance menu");
  double continuity_eps = 1e-8;
  add_common(continuity_cmd, flags, true);
  continuity_cmd->add_option("--eps", continuity_eps, "perturbation epsilon")->required();

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "instance generators");
  gen_cmd->require_subcommand(1);
  int gen_n = 4, gen_s = 4, gen_b = 2, gen_count = 8, gen_set_count = 4, gen_m = 2, gen_b2 = 0;
  double gen_eps = 0.5, gen_delta = 1.0, gen_h = 4.0;
  std::uint64_t retry_budget = 1'000'000;
  std::vector<double> gen_t;
  std::string out_perturbed;

  auto* cx_cmd = gen_cmd->add_subcommand("counterexample", "revenue-discontinuity family");
  add_common(cx_cmd, flags, false);
  cx_cmd->add_option("--n", gen_n, "item count (needs eps*n > 1)");
  cx_cmd->add_option("--eps", gen_eps, "perturbation epsilon");
  cx_cmd->add_option("--delta", gen_delta, "theorem delta in (0,1]");
  cx_cmd->add_option("--out-perturbed", out_perturbed, "also write the perturbed instance here");

  auto* sets_cmd = gen_cmd->add_subcommand("basic-sets", "bounded-intersection set system");
  add_common(sets_cmd, flags, false);
  sets_cmd->add_option("--n", gen_n, "ground item count");
  sets_cmd->add_option("--set-size", gen_s, "size of every set");
  sets_cmd->add_option("--overlap", gen_b, "max pairwise intersection");
  sets_cmd->add_option("--count", gen_count, "number of sets");
  sets_cmd->add_option("--retry-budget", retry_budget, "sampling attempt budget");

  auto* hud_cmd = gen_cmd->add_subcommand("hard-unitdemand", "unit-demand hard family");
  add_common(hud_cmd, flags, false);
  hud_cmd->add_option("--n", gen_n, "item count");
  hud_cmd->add_option("--set-size", gen_s, "basic set size s");
  hud_cmd->add_option("--overlap", gen_b, "max pairwise intersection b");
  hud_cmd->add_option("--count", gen_count, "number of atoms N");
  hud_cmd->add_option("--value-cap", gen_h, "value cap H");
  hud_cmd->add_option("--t", gen_t, "explicit t values (else truncated geometric)");
  hud_cmd->add_option("--retry-budget", retry_budget, "sampling attempt budget");

  auto* hxos_cmd = gen_cmd->add_subcommand("hard-xos", "xos hard family");
  add_common(hxos_cmd, flags, false);
  hxos_cmd->add_option("--n", gen_n, "item count");
  hxos_cmd->add_option("--set-size", gen_s, "basic set size s");
  hxos_cmd->add_option("--overlap", gen_b, "max pairwise intersection b");
  hxos_cmd->add_option("--set-count", gen_set_count, "number of ground basic sets");
  hxos_cmd->add_option("--m", gen_m, "basic sets per collection");
  hxos_cmd->add_option("--collection-overlap", gen_b2, "max shared sets between collections");
  hxos_cmd->add_option("--count", gen_count, "number of collections / atoms");
  hxos_cmd->add_option("--value-cap", gen_h, "value cap H");
  hxos_cmd->add_option("--t", gen_t, "explicit t values");
  hxos_cmd->add_option("--retry-budget", retry_budget, "sampling attempt budget");

  // beta
  auto* beta_cmd = app.add_subcommand("beta", "closed-form optimal two-item menu diagnostics");
  double grid_step = 1e-3;
  long long quad_points = 10'000;
  add_common(beta_cmd, flags, false);
  beta_cmd->add_option("--grid-step", grid_step, "verification grid step (<= 1e-3)");
  beta_cmd->add_option("--points", quad_points, "quadrature point budget (>= 1e4)");

  // selftest
  auto* selftest_cmd = app.add_subcommand("selftest", "oracle-equivalence self checks");
  flags.seed = 20240417;
  add_common(selftest_cmd, flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return BM_ERR_USAGE;
  }

  StringGuard out, error;

  if (revenue_cmd->parsed() || br_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const int buy_many = semantics == "buymany" ? 1 : 0;
    const bm_status rc = bm_best_response_report(inst.handle, buy_many, flags.tolerance,
                                                 &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    const json doc = json::parse(out.text);
    if (revenue_cmd->parsed()) {
      std::cout << doc["revenue"].dump() << "\n";
      if (!flags.out_path.empty()) {
        return flags.format == "csv" ? write_output(csv_best_response(doc), flags.out_path)
                                     : write_output(out.text, flags.out_path);
      }
      return BM_OK;
    }
    return emit_report(flags, out.text, csv_best_response);
  }

  if (verify_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_verify_report(inst.handle, flags.tolerance, &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (closure_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_closure_report(inst.handle, flags.tolerance, &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (lp_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_opt_buy_one_report(inst.handle, flags.tolerance, &out.text,
                                               &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (pricing_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_pricing_report(inst.handle, flags.seed, flags.tolerance, &out.text,
                                           &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text, csv_pricing_atoms);
  }

  if (compress_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_compress_report(inst.handle, epsilon, flags.tolerance, &out.text,
                                            &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (perturb_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    std::string spec_text;
    if (!spec_path.empty()) {
      if (int rc = read_file(spec_path, spec_text); rc != BM_OK) return rc;
    } else {
      if (perturb_eps <= 0.0) {
        std::cerr << "error (usage): perturb needs --spec or --eps\n";
        return BM_ERR_USAGE;
      }
      json spec{{"epsilon", perturb_eps}, {"mode", perturb_mode}, {"seed", flags.seed}};
      spec_text = spec.dump();
    }
    const bm_status rc = bm_perturb_instance(inst.handle, spec_text.c_str(), flags.tolerance,
                                             &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (continuity_cmd->parsed()) {
    InstanceGuard inst;
    if (int rc = load_instance(flags, inst); rc != BM_OK) return rc;
    const bm_status rc = bm_continuity_report(inst.handle, continuity_eps, flags.seed,
                                              flags.tolerance, &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text, csv_continuity);
  }

  if (gen_cmd->parsed()) {
    json params;
    const char* family = nullptr;
    if (cx_cmd->parsed()) {
      family = "counterexample";
      params = json{{"n", gen_n}, {"eps", gen_eps}, {"delta", gen_delta}, {"variant", "base"}};
    } else if (sets_cmd->parsed()) {
      family = "basic-sets";
      params = json{{"n", gen_n},         {"s", gen_s},
                    {"b", gen_b},         {"count", gen_count},
                    {"seed", flags.seed}, {"retry_budget", retry_budget}};
    } else if (hud_cmd->parsed()) {
      family = "hard-unitdemand";
      params = json{{"n", gen_n},   {"s", gen_s},         {"b", gen_b},
                    {"count", gen_count}, {"h", gen_h},   {"seed", flags.seed},
                    {"retry_budget", retry_budget}};
      if (!gen_t.empty()) params["t"] = gen_t;
    } else {
      family = "hard-xos";
      params = json{{"n", gen_n},           {"s", gen_s},
                    {"b", gen_b},           {"set_count", gen_set_count},
                    {"m", gen_m},           {"collection_overlap", gen_b2},
                    {"count", gen_count},   {"h", gen_h},
                    {"seed", flags.seed},   {"retry_budget", retry_budget}};
      if (!gen_t.empty()) params["t"] = gen_t;
    }
    bm_status rc = bm_generate(family, params.dump().c_str(), &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    if (int wrc = write_output(out.text, flags.out_path); wrc != BM_OK) return wrc;
    if (cx_cmd->parsed() && !out_perturbed.empty()) {
      params["variant"] = "perturbed";
      StringGuard out2, error2;
      rc = bm_generate(family, params.dump().c_str(), &out2.text, &error2.text);
      if (rc != BM_OK) return report_error(rc, error2.text);
      return write_output(out2.text, out_perturbed);
    }
    return BM_OK;
  }

  if (beta_cmd->parsed()) {
    const bm_status rc = bm_beta_report(grid_step, quad_points, &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    return emit_report(flags, out.text);
  }

  if (selftest_cmd->parsed()) {
    const bm_status rc = bm_selftest_report(flags.seed, &out.text, &error.text);
    if (rc != BM_OK) return report_error(rc, error.text);
    const json doc = json::parse(out.text);
    std::cout << "selftest: " << doc["checks"] << " checks, "
              << doc["failures"].size() << " failures\n";
    for (const auto& f : doc["failures"]) std::cout << "  FAIL " << f.get<std::string>() << "\n";
    if (!flags.out_path.empty()) write_output(out.text, flags.out_path);
    return doc["ok"].get<bool>() ? BM_OK : BM_ERR_INTERNAL;
  }

  return BM_ERR_USAGE;
}
