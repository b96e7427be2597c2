// Shared test fixtures and small numeric helpers.
#pragma once

#include "ida/accounting.hpp"
#include "ida/config.hpp"
#include "ida/state.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

namespace ida::test {

inline PoolState make_pool(uint32_t id, const std::string& symbol, double inventory,
                           double lp_inventory, double collateral_long, double coll_rate,
                           double price, double collateral_short = 0.0) {
    PoolState p;
    p.asset = AssetId{id, symbol};
    p.inventory = inventory;
    p.lp_inventory = lp_inventory;
    p.collateral_long = collateral_long;
    p.collateral_short = collateral_short;
    p.coll_rate = coll_rate;
    p.local_price = price;
    p.density = LiquidityDensity{price, 0.0};
    p.accounting_state = -p.density.nominal(inventory - lp_inventory);
    return p;
}

inline SystemState make_system(std::vector<PoolState> pools) {
    SystemState s;
    s.pools = std::move(pools);
    s.circulating_supply = net_oi_nominal(s);
    if (s.circulating_supply > 0.0)
        s.ledger.balances[kMarketAccount] = s.circulating_supply;
    for (size_t i = 0; i < s.pools.size(); ++i) {
        s.fee_states.push_back(FeeState{0.01, 0.5});
        s.pmo_states.push_back(PMOPoolState{});
    }
    s.cs_history.push_back(s.circulating_supply);
    return s;
}

// Distance in representable doubles; 0 means bit-identical.
inline int64_t ulp_distance(double a, double b) {
    if (a == b) return 0;
    int64_t ia, ib;
    std::memcpy(&ia, &a, 8);
    std::memcpy(&ib, &b, 8);
    if (ia < 0) ia = INT64_MIN - ia;
    if (ib < 0) ib = INT64_MIN - ib;
    const int64_t d = ia - ib;
    return d < 0 ? -d : d;
}

inline bool close_rel(double a, double b, double rel = 1e-12) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(a - b) <= rel * scale;
}

} // namespace ida::test
