#include "ida/accounting.hpp"

#include "ida/errors.hpp"
#include "ida/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>

using namespace ida;
using namespace ida::test;

TEST_SUITE("accounting") {

TEST_CASE("open inventory is inventory minus LP inventory") {
    CHECK(open_inventory(make_pool(0, "X", 120, 100, 40, 0.5, 1.0)) == 20.0);
    CHECK(open_inventory(make_pool(0, "X", 100, 100, 40, 0.5, 1.0)) == 0.0);
    CHECK(open_inventory(make_pool(0, "X", 80, 100, 40, 0.5, 1.0)) == -20.0);
}

TEST_CASE("utilization rate") {
    CHECK(utilization_rate(make_pool(0, "X", 120, 100, 40, 0.5, 1.0)) == doctest::Approx(0.25));
    CHECK(utilization_rate(make_pool(0, "X", 100, 100, 7, 0.9, 1.0)) == 0.0);
    CHECK(utilization_rate(make_pool(0, "X", 180, 100, 40, 0.5, 1.0)) == doctest::Approx(1.0));
    CHECK(utilization_rate(make_pool(0, "X", 80, 100, 40, 0.5, 1.0)) == doctest::Approx(-0.25));

    // Unhedgeable pool: no collateral with a live position.
    PoolState bare = make_pool(0, "X", 120, 100, 0, 0.5, 1.0);
    bare.collateral_long = 0.0;
    CHECK_THROWS_AS(utilization_rate(bare), Error);
    bare.inventory = bare.lp_inventory;
    CHECK(utilization_rate(bare) == 0.0);
}

TEST_CASE("utilization is monotone in inventory and collateral") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        const double lp = rng.uniform(10, 1000);
        const double extra = rng.uniform(1, 500);
        const double coll = rng.uniform(1, 500);
        const double rho = rng.uniform(0.05, 1.0);
        const auto base = make_pool(0, "X", lp + extra, lp, coll, rho, 1.0);
        const auto more_inv = make_pool(0, "X", lp + extra * 1.5, lp, coll, rho, 1.0);
        const auto more_coll = make_pool(0, "X", lp + extra, lp, coll * 1.5, rho, 1.0);
        CHECK(utilization_rate(more_inv) > utilization_rate(base));
        CHECK(utilization_rate(more_coll) < utilization_rate(base));
    }
}

TEST_CASE("circulating supply nominal nets positive and negative legs") {
    CHECK(circulating_supply_nominal(
              make_system({make_pool(0, "X", 120, 100, 40, 0.5, 1.0)})) == doctest::Approx(20));
    CHECK(circulating_supply_nominal(make_system({
              make_pool(0, "X", 100, 100, 40, 0.5, 1.0),
              make_pool(1, "Y", 50, 50, 40, 0.5, 2.0),
          })) == 0.0);
    CHECK(circulating_supply_nominal(make_system({
              make_pool(0, "A", 130, 100, 40, 0.5, 2.0),
              make_pool(1, "B", 90, 100, 40, 0.5, 1.0),
          })) == doctest::Approx(50));
}

TEST_CASE("supply nominal is invariant under pool relabeling") {
    auto a = make_pool(0, "A", 130, 100, 40, 0.5, 2.0);
    auto b = make_pool(1, "B", 90, 100, 40, 0.5, 1.0);
    auto c = make_pool(2, "C", 500, 100, 40, 0.5, 0.25);
    const double v1 = circulating_supply_nominal(make_system({a, b, c}));
    const double v2 = circulating_supply_nominal(make_system({c, a, b}));
    CHECK(v1 == v2);
}

TEST_CASE("attributable assets prorates collateral") {
    // One positive pool: OI nominal 50, collateral nominal 100.
    auto sys = make_system({make_pool(0, "X", 150, 100, 100, 0.5, 1.0)});
    CHECK(attributable_assets(sys) == doctest::Approx(150));

    // Fully offsetting inventory: net 0 against positive 50.
    auto off = make_system({
        make_pool(0, "X", 150, 100, 50, 0.5, 1.0),
        make_pool(1, "Y", 50, 100, 50, 0.5, 1.0),
    });
    CHECK(attributable_assets(off) == doctest::Approx(0));

    // Positive 60, negative 10, collateral nominal 120 in total.
    auto mixed = make_system({
        make_pool(0, "X", 160, 100, 70, 0.5, 1.0),
        make_pool(1, "Y", 90, 100, 50, 0.5, 1.0),
    });
    CHECK(attributable_assets(mixed) == doctest::Approx(150));

    // Alternate scope keeps only positive-OI pools' collateral.
    CHECK(attributable_assets(mixed, CollateralScope::positive_oi_only) ==
          doctest::Approx(50 + 70 * (50.0 / 60.0)));

    auto balanced = make_system({make_pool(0, "X", 100, 100, 40, 0.5, 1.0)});
    CHECK_THROWS_AS(attributable_assets(balanced), Error);
}

TEST_CASE("attributable equals net open inventory without collateral") {
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        auto a = make_pool(0, "A", 100 + rng.uniform(1, 50), 100, 0, 0.5, rng.uniform(0.5, 2));
        auto b = make_pool(1, "B", 100 - rng.uniform(0, 50), 100, 0, 0.5, rng.uniform(0.5, 2));
        auto sys = make_system({a, b});
        CHECK(close_rel(attributable_assets(sys), net_oi_nominal(sys)));
    }
}

TEST_CASE("coverage ratio") {
    auto sys = make_system({make_pool(0, "X", 150, 100, 100, 0.5, 1.0)}); // A = 150
    sys.circulating_supply = 150;
    CHECK(coverage_ratio(sys) == doctest::Approx(1.0));
    sys.circulating_supply = 100;
    CHECK(coverage_ratio(sys) == doctest::Approx(1.5));
    sys.circulating_supply = 300;
    CHECK(coverage_ratio(sys) == doctest::Approx(0.5));
    sys.circulating_supply = 0;
    CHECK_THROWS_AS(coverage_ratio(sys), Error);
}

TEST_CASE("coverage ratio round-trips against attributable assets") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        auto sys = make_system({make_pool(0, "X", 100 + rng.uniform(1, 100), 100,
                                          rng.uniform(10, 200), rng.uniform(0.1, 1), 1.0)});
        sys.circulating_supply = rng.uniform(1, 500);
        const double a = attributable_assets(sys);
        const double back = coverage_ratio(sys) * sys.circulating_supply;
        CHECK(ulp_distance(a, back) <= 1);
    }
}

TEST_CASE("capital efficiency") {
    // CS 50 against collateral nominal 100, proration 1.
    auto sys = make_system({make_pool(0, "X", 150, 100, 100, 0.5, 1.0)});
    sys.circulating_supply = 50;
    CHECK(capital_efficiency(sys) == doctest::Approx(0.5));
    sys.circulating_supply = 0;
    CHECK(capital_efficiency(sys) == 0.0);
}

TEST_CASE("capital efficiency matches the approximation at the target state") {
    // Every pool exactly at its target utilization and CS at the Eq.-4
    // identity: the two routes agree.
    const double target = 0.4;
    std::vector<PoolState> pools;
    const double colls[] = {80.0, 120.0, 50.0};
    const double rhos[] = {0.5, 0.8, 0.25};
    const double prices[] = {1.0, 2.0, 0.5};
    for (int i = 0; i < 3; ++i) {
        const double oi = target * colls[i] / rhos[i];
        pools.push_back(
            make_pool(static_cast<uint32_t>(i), std::string(1, char('X' + i)), 1000 + oi, 1000,
                      colls[i], rhos[i], prices[i]));
    }
    auto sys = make_system(pools);
    sys.circulating_supply = net_oi_nominal(sys);
    CHECK(close_rel(capital_efficiency(sys), capital_efficiency_approx(sys), 1e-12));
}

TEST_CASE("inventory gap to target") {
    const auto pool = make_pool(0, "X", 120, 100, 40, 0.5, 1.0);
    CHECK(inventory_gap_to_target(pool, 0.25) == doctest::Approx(0.0));
    CHECK(inventory_gap_to_target(pool, 0.2) == doctest::Approx(4.0));
    CHECK(inventory_gap_to_target(pool, 0.5) == doctest::Approx(-20.0));
}

TEST_CASE("balance sheet residual") {
    // Freshly initialized: CS equals net OI nominal by construction.
    auto sys = make_system({
        make_pool(0, "X", 150, 100, 100, 0.5, 1.0),
        make_pool(1, "Y", 300, 280, 50, 0.5, 2.0),
    });
    CHECK(balance_sheet_residual(sys) == doctest::Approx(0.0));

    // External price shock: the residual equals the revaluation of the open
    // position. One pool, OI 50 at price 1, price moves to 1.5.
    auto shocked = make_system({make_pool(0, "X", 150, 100, 100, 0.5, 1.0)});
    shocked.pools[0].density.price = 1.5;
    shocked.pools[0].local_price = 1.5;
    CHECK(balance_sheet_residual(shocked) == doctest::Approx(50 * 0.5));
}

} // TEST_SUITE
