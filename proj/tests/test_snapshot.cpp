#include "ida/snapshot.hpp"

#include "ida/config.hpp"
#include "ida/errors.hpp"
#include "ida/harness.hpp"
#include "ida/risk.hpp"
#include "ida/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace ida;
using namespace ida::test;
using nlohmann::json;

TEST_SUITE("snapshot") {

TEST_CASE("system state round-trips through JSON") {
    Rng rng(83);
    for (int i = 0; i < 50; ++i) {
        auto sys = make_system({
            make_pool(0, "X", 1000 + rng.uniform(0, 200), 1000, rng.uniform(10, 300),
                      rng.uniform(0.1, 1), rng.uniform(0.5, 2), rng.uniform(0, 50)),
            make_pool(1, "Y", 1000 + rng.uniform(0, 200), 1000, rng.uniform(10, 300),
                      rng.uniform(0.1, 1), rng.uniform(0.5, 2)),
        });
        sys.epoch = static_cast<int64_t>(rng.index(1000));
        sys.ledger.lp_tokens["market"]["X"] = rng.uniform(0, 10);
        sys.pmo_states[0].pending_since = 3;
        sys.pmo_states[0].announced_fraction = 0.125;
        sys.cs_history.push_back(sys.circulating_supply * 1.01);

        const json j = to_json(sys);
        const SystemState back = system_from_json(j);
        CHECK(to_json(back) == j);
        CHECK(back.circulating_supply == sys.circulating_supply);
        CHECK(back.pools[0].accounting_state == sys.pools[0].accounting_state);
        CHECK(back.pmo_states[0].pending_since == sys.pmo_states[0].pending_since);
    }
}

TEST_CASE("snapshot schema carries the documented field names") {
    const auto sys = make_system({make_pool(0, "X", 1100, 1000, 200, 0.5, 1.0)});
    const json j = to_json(sys);
    for (const char* key : {"pools", "circulating_supply", "treasury", "epoch", "ledger",
                            "fee_states", "pmo_states", "cs_history"})
        CHECK(j.contains(key));
    const json& pool = j.at("pools").at(0);
    for (const char* key : {"asset", "inventory", "lp_inventory", "collateral_long",
                            "collateral_short", "coll_rate", "accounting_state", "local_price",
                            "density"})
        CHECK(pool.contains(key));
    CHECK(pool.at("density").contains("price"));
    CHECK(pool.at("density").contains("depth_slope"));
}

TEST_CASE("fee state round-trips through the snapshot") {
    auto sys = make_system({make_pool(0, "X", 1100, 1000, 200, 0.5, 1.0)});
    sys.fee_states[0] = FeeState{0.0042, 0.61};
    const SystemState back = system_from_json(to_json(sys));
    CHECK(back.fee_states[0].prev_fee == 0.0042);
    CHECK(back.fee_states[0].prev_util == 0.61);
}

TEST_CASE("config defaults merge and unknown keys are rejected") {
    const json empty = json::object();
    const json resolved = merge_config(empty);
    CHECK(resolved.at("policy").at("fee").at("theta_0").get<double>() == 0.01);

    json bad{{"polcy", json::object()}};
    CHECK_THROWS_WITH_AS(merge_config(bad), doctest::Contains("unknown config key: polcy"),
                         Error);

    json nested{{"policy", {{"fee", {{"theta_zero", 0.1}}}}}};
    CHECK_THROWS_WITH_AS(merge_config(nested),
                         doctest::Contains("unknown config key: policy.fee.theta_zero"), Error);

    json asset_typo{{"assets", json::array({{{"symbol", "X"}, {"inventry", 5.0}}})}};
    CHECK_THROWS_AS(merge_config(asset_typo), Error);
}

TEST_CASE("invalid fee ordering is rejected at parse") {
    json user{{"assets", json::array({{{"symbol", "X"}}})},
              {"policy", {{"fee", {{"theta_floor", 0.05}, {"theta_0", 0.01}}}}}};
    const json resolved = merge_config(user);
    const ScenarioConfig config = config_from_json(resolved);
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("overrides navigate dotted paths and reject unknown keys") {
    json resolved = merge_config(json::object());
    apply_override(resolved, "policy.fee.theta_0=0.02");
    CHECK(resolved.at("policy").at("fee").at("theta_0").get<double>() == 0.02);
    apply_override(resolved, "seed=99");
    CHECK(resolved.at("seed").get<uint64_t>() == 99);
    apply_override(resolved, "policy.lever.mode=distance");
    CHECK(resolved.at("policy").at("lever").at("mode").get<std::string>() == "distance");

    CHECK_THROWS_AS(apply_override(resolved, "policy.fee.nope=1"), Error);
    CHECK_THROWS_AS(apply_override(resolved, "policy.fee=1"), Error);
    CHECK_THROWS_AS(apply_override(resolved, "no-equals-sign"), Error);

    // Array indexing into assets.
    json with_assets = merge_config(json{{"assets", json::array({{{"symbol", "X"}}})}});
    apply_override(with_assets, "assets.0.price=2.5");
    CHECK(with_assets.at("assets").at(0).at("price").get<double>() == 2.5);
    CHECK_THROWS_AS(apply_override(with_assets, "assets.3.price=2.5"), Error);
}

TEST_CASE("scenario config round-trips through JSON") {
    ScenarioConfig c;
    PoolInit x;
    x.symbol = "X";
    c.assets = {x};
    c.policy.pmo.variant = PMOParams::Variant::logistic;
    c.policy.lever.mode = LeverParams::Mode::distance;
    c.du_source = ScenarioConfig::DuSource::correlation;
    c.search.mode = SearchConfig::Mode::coordinate;
    c.scripted.push_back(ScriptedTrade{3, "X", TradeSide::sell, 12.5});
    const json j = config_to_json(c);
    const ScenarioConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
}

TEST_CASE("correlation matrix CSV loading") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ida_corr_test";
    fs::create_directories(dir);
    const fs::path good = dir / "good.csv";
    {
        std::ofstream out(good);
        out << "X, Y\n1.0, 0.25\n0.25, 1.0\n";
    }
    const CorrelationMatrix m = CorrelationMatrix::load_csv(good.string());
    CHECK(m.symbols == std::vector<std::string>{"X", "Y"});
    CHECK(m.at(0, 1) == 0.25);

    const fs::path ragged = dir / "ragged.csv";
    {
        std::ofstream out(ragged);
        out << "X,Y\n1.0,0.25\n0.25\n";
    }
    CHECK_THROWS_AS(CorrelationMatrix::load_csv(ragged.string()), Error);

    const fs::path asym = dir / "asym.csv";
    {
        std::ofstream out(asym);
        out << "X,Y\n1.0,0.25\n0.3,1.0\n";
    }
    CHECK_THROWS_AS(CorrelationMatrix::load_csv(asym.string()), Error);
    fs::remove_all(dir);
}

TEST_CASE("final snapshot of a run parses back") {
    ScenarioConfig c;
    PoolInit x;
    x.symbol = "X";
    c.assets = {x};
    c.horizon = 3;
    c.traders.enabled = true;
    const RunOutput run = run_scenario(c);
    const SystemState back = system_from_json(to_json(run.final_state));
    CHECK(back.circulating_supply == run.final_state.circulating_supply);
    CHECK(back.epoch == run.final_state.epoch);
}

} // TEST_SUITE
