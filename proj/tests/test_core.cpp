#include <doctest.h>

#include <random>

#include "core/io.hpp"
#include "core/model.hpp"
#include "support.hpp"

using namespace bm;

TEST_CASE("itemset basics") {
  ItemSet s = ItemSet::from_mask(0b101);
  CHECK(s.contains(0));
  CHECK(!s.contains(1));
  CHECK(s.contains(2));
  CHECK(s.count() == 2);
  CHECK(s.subset_of(ItemSet::from_mask(0b111)));
  CHECK(!s.subset_of(ItemSet::from_mask(0b011)));
  CHECK(s.union_with(ItemSet::single(1)) == ItemSet::from_mask(0b111));
  CHECK(ItemSet{}.empty());
  CHECK(ItemSet::full(3).mask() == 0b111);
  CHECK(s.to_string() == "{0,2}");

  ItemSet big = ItemSet::single(255);
  CHECK(big.max_item() == 255);
  CHECK_THROWS_AS(ItemSet::single(256), validation_error);
  CHECK_THROWS_AS((void)big.mask(), validation_error);
}

TEST_CASE("evaluate across kinds") {
  const ItemSet s01 = ItemSet::from_mask(0b11);
  CHECK(Valuation::additive({3, 4})(s01) == doctest::Approx(7).epsilon(1e-12));
  CHECK(Valuation::unit_demand({3, 4})(s01) == doctest::Approx(4).epsilon(1e-12));
  CHECK(Valuation::xos(2, {{1, 0}, {0, 2}})(s01) == doctest::Approx(2).epsilon(1e-12));
  CHECK(Valuation::additive({3, 4})(ItemSet{}) == 0.0);

  // out-of-range item index
  CHECK_THROWS_AS(Valuation::additive({3, 4})(ItemSet::single(2)), validation_error);
}

TEST_CASE("table valuation validation") {
  CHECK_THROWS_AS(Valuation::table(2, {0, 5, 1, 3}), validation_error);   // v({0}) > v({0,1})
  CHECK_THROWS_AS(Valuation::table(2, {1, 2, 2, 3}), validation_error);   // v(empty) != 0
  const Valuation v = Valuation::table(2, {0, 2, 1, 5});
  CHECK(v(ItemSet::from_mask(0b11)) == 5);
  CHECK(v(ItemSet::single(1)) == 1);
}

TEST_CASE("lottery value and utility") {
  const Valuation v = Valuation::additive({10, 10});
  const Lottery half({{ItemSet::single(0), 0.5}, {ItemSet::single(1), 0.5}}, 1.0);
  CHECK(lottery_value(v, half) == doctest::Approx(10).epsilon(1e-12));
  CHECK(utility(v, half) == doctest::Approx(9).epsilon(1e-12));
  CHECK(lottery_value(v, Lottery::null_lottery()) == 0.0);
  CHECK(utility(v, Lottery::null_lottery()) == 0.0);

  const Valuation table = Valuation::table(2, {0, 2, 0, 5});
  const Lottery mix({{ItemSet::single(0), 0.5}, {ItemSet::from_mask(0b11), 0.5}}, 0.0);
  CHECK(lottery_value(table, mix) == doctest::Approx(3.5).epsilon(1e-12));

  // IR boundary: unit-demand (3,4), item 1 surely at price 4
  const Valuation ud = Valuation::unit_demand({3, 4});
  CHECK(utility(ud, Lottery::deterministic(ItemSet::single(1), 4.0)) ==
        doctest::Approx(0).epsilon(1e-12));

  CHECK_THROWS_AS(Lottery({{ItemSet::single(0), 0.8}}, 1.0), validation_error);
  CHECK_THROWS_AS(Lottery({{ItemSet::single(0), 1.0}}, -1.0), validation_error);
}

TEST_CASE("menu deduplicates identical allocations to the minimum price") {
  const Menu menu({Lottery::deterministic(ItemSet::single(0), 3.0),
                   Lottery::deterministic(ItemSet::single(0), 2.0),
                   Lottery::deterministic(ItemSet::single(1), 1.0)},
                  Semantics::BuyOne);
  REQUIRE(menu.size() == 2);
  CHECK(menu.entries()[0].price() == 2.0);
  CHECK(menu.entries()[1].price() == 1.0);
}

TEST_CASE("instance documents: load, validate, round-trip") {
  const std::string minimal = R"({
    "n": 1,
    "distribution": [{"prob": 1.0, "valuation": {"kind": "additive", "values": [2.0]}}],
    "menu": {"semantics": "buyone", "entries": []}
  })";
  const Instance inst = load_instance_text(minimal);
  CHECK(inst.n == 1);
  CHECK(inst.distribution.atoms().size() == 1);
  CHECK(inst.menu.size() == 0);

  SUBCASE("monotonicity violation is reported with a path") {
    const std::string bad = R"({
      "n": 2,
      "distribution": [{"prob": 1.0, "valuation": {"kind": "table", "values": [0, 5, 1, 3]}}],
      "menu": {"semantics": "buyone", "entries": []}
    })";
    CHECK_THROWS_WITH_AS(load_instance_text(bad),
                         doctest::Contains("$.distribution[0].valuation"), validation_error);
  }

  SUBCASE("probability-sum violation") {
    const std::string bad = R"({
      "n": 1,
      "distribution": [{"prob": 1.0, "valuation": {"kind": "additive", "values": [1.0]}}],
      "menu": {"semantics": "buyone",
               "entries": [{"allocation": [{"set": [0], "prob": 0.8}], "price": 1.0}]}
    })";
    CHECK_THROWS_WITH_AS(load_instance_text(bad), doctest::Contains("probabilities sum"),
                         validation_error);
  }

  SUBCASE("round-trip is the identity on validated documents") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
      Instance original;
      original.n = 1 + static_cast<int>(rng() % 3);
      original.distribution = testsupport::random_distribution(original.n, 2, rng);
      original.menu = testsupport::random_lottery_menu(original.n, 3, rng);
      const auto doc = save_instance(original);
      const Instance reloaded = load_instance(doc);
      CHECK(save_instance(reloaded).dump() == doc.dump());
    }
  }
}

TEST_CASE("monotone under inclusion for every kind") {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 30; ++round) {
    const int n = 1 + static_cast<int>(rng() % 10);
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (double& v : vals) v = testsupport::quantized(rng, 0.0, 10.0);
    std::vector<Valuation> kinds = {Valuation::additive(vals), Valuation::unit_demand(vals)};
    if (n <= 10) {
      std::vector<std::vector<double>> clauses(2, std::vector<double>(vals.size()));
      for (auto& clause : clauses)
        for (double& w : clause) w = testsupport::quantized(rng, 0.0, 10.0);
      kinds.push_back(Valuation::xos(n, clauses));
    }
    for (const auto& v : kinds) {
      const auto table = v.dense_table();
      const std::uint32_t count = std::uint32_t{1} << n;
      for (std::uint32_t mask = 1; mask < count; ++mask) {
        for (std::uint32_t bits = mask; bits; bits &= bits - 1) {
          const std::uint32_t sub = mask & ~(bits & (~bits + 1));
          CHECK(table[sub] <= table[mask] + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("unit-demand and additive agree with their table encodings") {
  std::mt19937_64 rng(17);
  for (int round = 0; round < 10; ++round) {
    const int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> vals(static_cast<std::size_t>(n));
    for (double& v : vals) v = testsupport::quantized(rng, 0.0, 10.0);
    for (const auto& v : {Valuation::additive(vals), Valuation::unit_demand(vals)}) {
      const Valuation table = Valuation::table(n, v.dense_table());
      const std::uint32_t count = std::uint32_t{1} << n;
      for (std::uint32_t mask = 0; mask < count; ++mask) {
        CHECK(v.value_mask(mask) == doctest::Approx(table.value_mask(mask)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("marginal allocation round trip") {
  const MarginalAllocation m({0.25, 0.0, 0.5});
  const Lottery lot = m.to_lottery(1.5);
  CHECK(lot.support().size() == 3);  // empty set carries the slack
  const MarginalAllocation back = MarginalAllocation::from_lottery(lot, 3);
  CHECK(back.probabilities() == std::vector<double>{0.25, 0.0, 0.5});
  CHECK_THROWS_AS(MarginalAllocation::from_lottery(
                      Lottery::deterministic(ItemSet::from_mask(0b11), 1.0), 2),
                  validation_error);
  CHECK_THROWS_AS(MarginalAllocation({0.7, 0.7}), validation_error);
}
