#include <doctest.h>

#include <cmath>
#include <random>

#include "core/compress.hpp"
#include "core/lp.hpp"
#include "core/pricing.hpp"
#include "core/verify.hpp"
#include "support.hpp"

using namespace bm;

namespace {

Menu marginal_menu(std::vector<std::pair<std::vector<double>, double>> entries) {
  std::vector<Lottery> lots;
  for (auto& [coords, price] : entries) {
    lots.push_back(MarginalAllocation(coords).to_lottery(price));
  }
  return Menu(std::move(lots), Semantics::BuyMany);
}

std::vector<double> marginals_of(const Lottery& lot, int n) {
  return MarginalAllocation::from_lottery(lot, n).probabilities();
}

}  // namespace

TEST_CASE("compression parameters") {
  const CompressionParams p = make_compression_params(0.5, 2);
  CHECK(p.delta() == doctest::Approx(0.015625).epsilon(1e-15));
  CHECK(p.grid_step() == doctest::Approx(0.000244140625).epsilon(1e-15));
  CHECK(p.keep_discount() == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));
  CHECK(p.round_discount() == doctest::Approx(1.0 - std::sqrt(0.015625)).epsilon(1e-12));
}

TEST_CASE("drop small coordinates") {
  const CompressionParams p = make_compression_params(0.5, 2);  // delta = 0.015625
  SUBCASE("a coordinate strictly inside (0, delta) removes the entry") {
    const Menu menu = marginal_menu({{{0.01, 0.99}, 1.0}});
    CHECK(drop_small(menu, p).size() == 0);
  }
  SUBCASE("zero coordinates are allowed") {
    const Menu menu = marginal_menu({{{0.0, 1.0}, 1.0}});
    const Menu kept = drop_small(menu, p);
    REQUIRE(kept.size() == 1);
    CHECK(kept.entries()[0].price() == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-12));
    CHECK(marginals_of(kept.entries()[0], 2) == std::vector<double>{0.0, 1.0});
  }
  SUBCASE("coordinates at or above delta survive") {
    const Menu menu = marginal_menu({{{0.5, 0.5}, 1.0}});
    CHECK(drop_small(menu, p).size() == 1);
  }
}

TEST_CASE("grid rounding") {
  const CompressionParams p = make_compression_params(0.5, 2);  // step = 2^-12
  SUBCASE("on-grid coordinates are unchanged") {
    const Menu menu = marginal_menu({{{0.5, 0.5}, 1.0}});
    const Menu out = grid_round(menu, p);
    REQUIRE(out.size() == 1);
    CHECK(marginals_of(out.entries()[0], 2) == std::vector<double>{0.5, 0.5});
    CHECK(out.entries()[0].price() ==
          doctest::Approx(1.0 - std::sqrt(p.delta())).epsilon(1e-12));
  }
  SUBCASE("off-grid coordinates floor to the grid") {
    const Menu menu = marginal_menu({{{0.3333, 0.0}, 1.0}});
    const Menu out = grid_round(menu, p);
    REQUIRE(out.size() == 1);
    const auto coords = marginals_of(out.entries()[0], 2);
    CHECK(coords[0] == doctest::Approx(0.333251953125).epsilon(1e-15));
    CHECK(coords[1] == 0.0);
  }
  SUBCASE("empty menu stays empty") {
    CHECK(grid_round(Menu{}, p).size() == 0);
  }
  SUBCASE("duplicates collapse to the minimum price") {
    const Menu menu = marginal_menu({{{0.50001, 0.4}, 2.0}, {{0.5, 0.4}, 1.0}});
    const Menu out = grid_round(menu, p);
    REQUIRE(out.size() == 1);
    CHECK(out.entries()[0].price() ==
          doctest::Approx(1.0 - std::sqrt(p.delta())).epsilon(1e-12));
  }
}

TEST_CASE("compression pipeline") {
  std::mt19937_64 rng(131);
  SUBCASE("on-grid menus only get the price discounts") {
    const double eps = 0.5;
    const Menu menu = marginal_menu({{{0.5, 0.5}, 2.0}, {{1.0, 0.0}, 1.0}});
    const TypeDistribution d = testsupport::random_distribution(2, 2, rng, true);
    const auto [out, report] = compress(menu, d, eps);
    REQUIRE(out.size() == 2);
    const double factor = (1.0 - std::sqrt(eps)) * (1.0 - std::sqrt(report.delta));
    for (std::size_t e = 0; e < out.size(); ++e) {
      CHECK(marginals_of(out.entries()[e], 2) == marginals_of(menu.entries()[e], 2));
      CHECK(out.entries()[e].price() ==
            doctest::Approx(menu.entries()[e].price() * factor).epsilon(1e-12));
    }
  }
  SUBCASE("expanded item pricings survive intact") {
    const Menu pricing = expand_item_pricing({1.0, 2.0});
    const TypeDistribution d = testsupport::random_distribution(2, 2, rng, true);
    // marginal coordinates are all 0 or 1
    const auto [out, report] = compress(pricing, d, 0.25);
    CHECK(out.size() == pricing.size());
    CHECK(report.size_bound_ok);
  }
  SUBCASE("allocation fixpoint under re-application") {
    for (const double eps : {0.25, 0.5}) {
      const TypeDistribution d = testsupport::random_distribution(2, 3, rng, true);
      const OptBuyOneResult opt = opt_buy_one(d);
      const auto [once, r1] = compress(opt.menu, d, eps);
      const auto [twice, r2] = compress(once, d, eps);
      REQUIRE(once.size() == twice.size());
      for (std::size_t e = 0; e < once.size(); ++e) {
        CHECK(twice.entries()[e].same_allocation(once.entries()[e], 1e-12));
      }
      CHECK(r1.size_bound_ok);
      CHECK(r2.size_bound_ok);
    }
  }
  SUBCASE("size bound holds on random unit-demand menus") {
    for (int round = 0; round < 10; ++round) {
      const TypeDistribution d = testsupport::random_distribution(2, 2, rng, true);
      std::vector<std::pair<std::vector<double>, double>> entries;
      const int count = 1 + static_cast<int>(rng() % 5);
      for (int e = 0; e < count; ++e) {
        const double a = testsupport::quantized(rng, 0.0, 1.0, 1e-4);
        entries.push_back({{a, testsupport::quantized(rng, 0.0, 1.0 - a, 1e-4)},
                           testsupport::quantized(rng, 0.0, 3.0)});
      }
      const auto [out, report] = compress(marginal_menu(std::move(entries)), d, 0.25);
      CHECK(report.size_bound_ok);
      CHECK(std::log2(static_cast<double>(std::max<std::size_t>(out.size(), 1)))
            <= report.size_bound_log2 + 1e-9);
    }
  }
}

TEST_CASE("meta-item route") {
  SUBCASE("single-item table instances reduce to the marginal pipeline") {
    const TypeDistribution d({{1.0, Valuation::table(1, {0.0, 2.0})}});
    const Menu menu({Lottery({{ItemSet::single(0), 0.5}, {ItemSet{}, 0.5}}, 1.0)},
                    Semantics::BuyMany);
    const auto [out, report] = meta_item_compress(menu, d, 0.5);
    CHECK(report.meta);
    CHECK(report.effective_items == 2);
    REQUIRE(out.size() == 1);
    // 0.5 is a multiple of the meta grid step, so the allocation is kept
    CHECK(out.entries()[0].same_allocation(menu.entries()[0], 1e-12));
  }
  SUBCASE("deterministic allocations are unchanged") {
    const TypeDistribution d({{1.0, Valuation::table(2, {0.0, 1.0, 2.0, 3.0})}});
    const Menu menu({Lottery::deterministic(ItemSet::from_mask(0b11), 2.0),
                     Lottery::deterministic(ItemSet::single(0), 1.0)},
                    Semantics::BuyMany);
    const auto [out, report] = meta_item_compress(menu, d, 0.5);
    REQUIRE(out.size() == 2);
    for (std::size_t e = 0; e < out.size(); ++e) {
      CHECK(out.entries()[e].same_allocation(menu.entries()[e], 1e-12));
    }
    CHECK(report.effective_items == 4);
  }
  SUBCASE("table distributions route through the meta path with 2^n constants") {
    std::mt19937_64 rng(137);
    std::vector<double> table = {0.0, testsupport::quantized(rng, 0.0, 3.0), 0.0, 0.0};
    table[2] = testsupport::quantized(rng, 0.0, 3.0);
    table[3] = std::max(table[1], table[2]) + testsupport::quantized(rng, 0.0, 3.0);
    const TypeDistribution d({{1.0, Valuation::table(2, table)}});
    const Menu menu = testsupport::random_lottery_menu(2, 3, rng);
    const auto [out, report] = compress(menu, d, 0.5);
    CHECK(report.meta);
    CHECK(report.effective_items == 4);
    CHECK(report.delta == doctest::Approx(std::pow(0.5, 3) / 64.0).epsilon(1e-15));
    CHECK(report.size_bound_ok);
    (void)out;
  }
}
