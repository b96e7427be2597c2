#include "ida/snapshot.hpp"

#include "ida/errors.hpp"

namespace ida {

using nlohmann::json;

json pool_to_json(const PoolState& p) {
    return json{{"asset", {{"id", p.asset.id}, {"symbol", p.asset.symbol}}},
                {"inventory", p.inventory},
                {"lp_inventory", p.lp_inventory},
                {"collateral_long", p.collateral_long},
                {"collateral_short", p.collateral_short},
                {"coll_rate", p.coll_rate},
                {"accounting_state", p.accounting_state},
                {"local_price", p.local_price},
                {"density", {{"price", p.density.price}, {"depth_slope", p.density.depth_slope}}}};
}

PoolState pool_from_json(const json& j) {
    PoolState p;
    p.asset.id = j.at("asset").at("id").get<uint32_t>();
    p.asset.symbol = j.at("asset").at("symbol").get<std::string>();
    p.inventory = j.at("inventory").get<double>();
    p.lp_inventory = j.at("lp_inventory").get<double>();
    p.collateral_long = j.at("collateral_long").get<double>();
    p.collateral_short = j.at("collateral_short").get<double>();
    p.coll_rate = j.at("coll_rate").get<double>();
    p.accounting_state = j.at("accounting_state").get<double>();
    p.local_price = j.at("local_price").get<double>();
    p.density.price = j.at("density").at("price").get<double>();
    p.density.depth_slope = j.at("density").at("depth_slope").get<double>();
    return p;
}

json to_json(const SystemState& s) {
    json pools = json::array();
    for (const auto& p : s.pools) pools.push_back(pool_to_json(p));

    json balances = json::object();
    for (const auto& [account, amount] : s.ledger.balances) balances[account] = amount;
    json lp_tokens = json::object();
    for (const auto& [account, claims] : s.ledger.lp_tokens) {
        json per_asset = json::object();
        for (const auto& [symbol, units] : claims) per_asset[symbol] = units;
        lp_tokens[account] = per_asset;
    }

    json fee_states = json::array();
    for (const auto& f : s.fee_states)
        fee_states.push_back(json{{"prev_fee", f.prev_fee}, {"prev_util", f.prev_util}});
    json pmo_states = json::array();
    for (const auto& p : s.pmo_states) {
        json e{{"rounds_above", p.rounds_above}};
        e["pending_since"] = p.pending_since ? json(*p.pending_since) : json(nullptr);
        e["announced_fraction"] =
            p.announced_fraction ? json(*p.announced_fraction) : json(nullptr);
        pmo_states.push_back(e);
    }

    return json{{"pools", pools},
                {"circulating_supply", s.circulating_supply},
                {"treasury", s.treasury()},
                {"epoch", s.epoch},
                {"ledger", {{"balances", balances}, {"lp_tokens", lp_tokens}}},
                {"fee_states", fee_states},
                {"pmo_states", pmo_states},
                {"cs_history", s.cs_history}};
}

SystemState system_from_json(const json& j) {
    SystemState s;
    for (const auto& jp : j.at("pools")) s.pools.push_back(pool_from_json(jp));
    s.circulating_supply = j.at("circulating_supply").get<double>();
    s.epoch = j.at("epoch").get<int64_t>();
    for (const auto& [account, amount] : j.at("ledger").at("balances").items())
        s.ledger.balances[account] = amount.get<double>();
    for (const auto& [account, claims] : j.at("ledger").at("lp_tokens").items())
        for (const auto& [symbol, units] : claims.items())
            s.ledger.lp_tokens[account][symbol] = units.get<double>();
    for (const auto& jf : j.at("fee_states"))
        s.fee_states.push_back(
            FeeState{jf.at("prev_fee").get<double>(), jf.at("prev_util").get<double>()});
    for (const auto& jp : j.at("pmo_states")) {
        PMOPoolState p;
        p.rounds_above = jp.at("rounds_above").get<int>();
        if (!jp.at("pending_since").is_null())
            p.pending_since = jp.at("pending_since").get<int64_t>();
        if (!jp.at("announced_fraction").is_null())
            p.announced_fraction = jp.at("announced_fraction").get<double>();
        s.pmo_states.push_back(p);
    }
    for (const auto& v : j.at("cs_history")) s.cs_history.push_back(v.get<double>());
    const double treasury = j.at("treasury").get<double>();
    if (std::abs(treasury - s.treasury()) > 1e-9)
        raise(ErrCode::config_error, "snapshot treasury does not match the ledger");
    return s;
}

} // namespace ida
