#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include <json.hpp>

#include "buymany/buymany.h"

using nlohmann::json;

namespace {

struct Str {
  char* text = nullptr;
  ~Str() { bm_string_free(text); }
  std::string view() const { return text ? std::string(text) : std::string(); }
};

struct Inst {
  bm_instance* handle = nullptr;
  ~Inst() { bm_instance_free(handle); }
};

const char* kTwoItemInstance = R"({
  "n": 2,
  "distribution": [
    {"prob": 1.0, "valuation": {"kind": "additive", "values": [10.0, 10.0]}}
  ],
  "menu": {"semantics": "buymany", "entries": [
    {"allocation": [{"set": [0], "prob": 1.0}], "price": 1.0},
    {"allocation": [{"set": [1], "prob": 1.0}], "price": 1.0}
  ]}
})";

}  // namespace

TEST_CASE("instance lifecycle and revenue") {
  Inst inst;
  Str error;
  REQUIRE(bm_instance_from_json(kTwoItemInstance, 1e-9, &inst.handle, &error.text) == BM_OK);
  CHECK(bm_instance_items(inst.handle) == 2);
  CHECK(bm_instance_atoms(inst.handle) == 1);
  CHECK(bm_instance_menu_size(inst.handle) == 2);

  double rev = 0.0;
  REQUIRE(bm_revenue(inst.handle, 1, 1e-9, &rev, &error.text) == BM_OK);
  CHECK(rev == doctest::Approx(2.0).epsilon(1e-12));
  REQUIRE(bm_revenue(inst.handle, 0, 1e-9, &rev, &error.text) == BM_OK);
  CHECK(rev == doctest::Approx(1.0).epsilon(1e-12));

  Str round_trip;
  REQUIRE(bm_instance_to_json(inst.handle, &round_trip.text, &error.text) == BM_OK);
  Inst again;
  REQUIRE(bm_instance_from_json(round_trip.text, 1e-9, &again.handle, &error.text) == BM_OK);
  Str twice;
  REQUIRE(bm_instance_to_json(again.handle, &twice.text, &error.text) == BM_OK);
  CHECK(round_trip.view() == twice.view());
}

TEST_CASE("error codes") {
  SUBCASE("usage") {
    CHECK(bm_instance_from_json(nullptr, 1e-9, nullptr, nullptr) == BM_ERR_USAGE);
    CHECK(std::string(bm_status_name(BM_ERR_USAGE)) == "usage");
  }
  SUBCASE("validation with message") {
    Inst inst;
    Str error;
    CHECK(bm_instance_from_json("{\"n\": 1}", 1e-9, &inst.handle, &error.text) ==
          BM_ERR_VALIDATION);
    CHECK(error.view().find("distribution") != std::string::npos);
  }
  SUBCASE("capacity") {
    const std::string big = R"({
      "n": 5,
      "distribution": [{"prob": 1.0, "valuation": {"kind": "additive",
                        "values": [1, 1, 1, 1, 1]}}],
      "menu": {"semantics": "buymany", "entries": []}
    })";
    Inst inst;
    Str error, out;
    REQUIRE(bm_instance_from_json(big.c_str(), 1e-9, &inst.handle, &error.text) == BM_OK);
    CHECK(bm_closure_report(inst.handle, 1e-9, &out.text, &error.text) == BM_ERR_CAPACITY);
  }
}

TEST_CASE("generate, reload and reproduce the counterexample revenue") {
  Str doc, error;
  REQUIRE(bm_generate("counterexample", R"({"n":4,"eps":0.5,"delta":1.0})", &doc.text,
                      &error.text) == BM_OK);
  Inst inst;
  REQUIRE(bm_instance_from_json(doc.text, 1e-9, &inst.handle, &error.text) == BM_OK);
  double rev = 0.0;
  REQUIRE(bm_revenue(inst.handle, 1, 1e-9, &rev, &error.text) == BM_OK);
  CHECK(rev == doctest::Approx(4.0).epsilon(1e-12));

  SUBCASE("deterministic output") {
    Str doc2;
    REQUIRE(bm_generate("counterexample", R"({"n":4,"eps":0.5,"delta":1.0})", &doc2.text,
                        &error.text) == BM_OK);
    CHECK(doc.view() == doc2.view());
  }
  SUBCASE("perturbed variant optimum") {
    Str pdoc;
    REQUIRE(bm_generate("counterexample", R"({"n":4,"eps":0.5,"delta":1.0,
                        "variant":"perturbed"})", &pdoc.text, &error.text) == BM_OK);
    Inst pinst;
    REQUIRE(bm_instance_from_json(pdoc.text, 1e-9, &pinst.handle, &error.text) == BM_OK);
    Str report;
    REQUIRE(bm_opt_buy_one_report(pinst.handle, 1e-9, &report.text, &error.text) == BM_OK);
    const json parsed = json::parse(report.view());
    CHECK(parsed["revenue"].get<double>() == doctest::Approx(3.75).epsilon(1e-6));
  }
  SUBCASE("unknown family is a validation error") {
    Str out;
    CHECK(bm_generate("nope", "{}", &out.text, &error.text) == BM_ERR_VALIDATION);
  }
}

TEST_CASE("verify and perturb reports") {
  const std::string bad = R"({
    "n": 2,
    "distribution": [{"prob": 1.0, "valuation": {"kind": "additive", "values": [10, 10]}}],
    "menu": {"semantics": "buymany", "entries": [
      {"allocation": [{"set": [0], "prob": 1.0}], "price": 1.0},
      {"allocation": [{"set": [1], "prob": 1.0}], "price": 1.0},
      {"allocation": [{"set": [0, 1], "prob": 1.0}], "price": 3.0}
    ]}
  })";
  Inst inst;
  Str error;
  REQUIRE(bm_instance_from_json(bad.c_str(), 1e-9, &inst.handle, &error.text) == BM_OK);
  Str verify;
  REQUIRE(bm_verify_report(inst.handle, 1e-9, &verify.text, &error.text) == BM_OK);
  const json parsed = json::parse(verify.view());
  CHECK(!parsed["holds"].get<bool>());
  CHECK(parsed["witness"]["payment"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));

  Str perturbed;
  REQUIRE(bm_perturb_instance(inst.handle, R"({"epsilon":0.1,"mode":"random-items","seed":3})",
                              1e-9, &perturbed.text, &error.text) == BM_OK);
  Inst pinst;
  REQUIRE(bm_instance_from_json(perturbed.text, 1e-9, &pinst.handle, &error.text) == BM_OK);
  CHECK(bm_instance_atoms(pinst.handle) == 1);
}

TEST_CASE("selftest and beta reports") {
  Str error;
  SUBCASE("selftest is green") {
    Str out;
    REQUIRE(bm_selftest_report(20240417ull, &out.text, &error.text) == BM_OK);
    const json parsed = json::parse(out.view());
    CHECK(parsed["ok"].get<bool>());
    CHECK(parsed["checks"].get<int>() > 50);
  }
  SUBCASE("beta report carries the verification margin") {
    Str out;
    REQUIRE(bm_beta_report(1e-3, 10'000, &out.text, &error.text) == BM_OK);
    const json parsed = json::parse(out.view());
    CHECK(parsed["verify"]["holds"].get<bool>());
    CHECK(parsed["verify"]["min_margin"].get<double>() >= 0.37);
    CHECK(parsed["revenue"]["difference"].get<double>() < 1e-4);
  }
}
