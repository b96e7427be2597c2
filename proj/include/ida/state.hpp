// Balance-sheet data model: pools, holders ledger, and the full system state.
// All quantities are doubles; unit conventions:
//   peg-units   -- the denomination IDA is pegged to (nominal values)
//   asset-units -- volume of a pool's asset
//   IDA-units   -- circulating supply, at par with peg-units as unit of account
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ida {

struct AssetId {
    uint32_t id{0};
    std::string symbol;

    friend bool operator==(const AssetId& a, const AssetId& b) { return a.id == b.id; }
    friend bool operator<(const AssetId& a, const AssetId& b) { return a.id < b.id; }
};

// External liquidity density: maps asset volume to peg value. Linear by
// default; a nonzero depth_slope adds a quadratic slippage term whose
// marginal price decays to zero and then saturates, keeping the map
// monotone nondecreasing.
struct LiquidityDensity {
    double price{1.0};       // peg-units per asset-unit
    double depth_slope{0.0}; // peg-units per asset-unit^2, >= 0

    // Odd extension: nominal(-v) == -nominal(v).
    double nominal(double volume) const {
        if (volume < 0.0) return -nominal(-volume);
        if (depth_slope <= 0.0) return price * volume;
        const double v_sat = price / depth_slope;
        if (volume <= v_sat) return price * volume - 0.5 * depth_slope * volume * volume;
        return 0.5 * price * v_sat;
    }
};

struct PoolState {
    AssetId asset;
    double inventory{0.0};        // asset-units
    double lp_inventory{0.0};     // asset-units owned by primary LPs
    double collateral_long{0.0};  // asset-units in the long vault
    double collateral_short{0.0}; // asset-units in the short vault
    double coll_rate{0.5};        // fraction in (0, 1]
    double accounting_state{0.0}; // signed IDA-units owed against the pool (negative = owed)
    double local_price{1.0};      // peg-units per asset-unit, adopting AMM's local market
    LiquidityDensity density;     // external market
};

// Reserved ledger accounts. The treasury accrues fee income as IDA and is
// part of circulating supply; the rebalancer account funds auction fills.
inline constexpr const char* kTreasuryAccount = "treasury";
inline constexpr const char* kRebalancerAccount = "rebalancer";
inline constexpr const char* kMarketAccount = "market";

struct HoldersLedger {
    std::map<std::string, double> balances; // account-id -> IDA-units
    // account-id -> asset symbol -> asset-units of LP claim
    std::map<std::string, std::map<std::string, double>> lp_tokens;

    double total() const {
        double s = 0.0;
        for (const auto& [k, v] : balances) s += v;
        return s;
    }
};

// Per-pool differential-fee memory (previous epoch's executed fee and
// utilization).
struct FeeState {
    double prev_fee{0.0};
    double prev_util{0.0};
};

// Per-pool PMO machine state. announced_fraction is frozen at announce time.
struct PMOPoolState {
    int rounds_above{0};
    std::optional<int64_t> pending_since;
    std::optional<double> announced_fraction;
};

struct SystemState {
    std::vector<PoolState> pools;
    double circulating_supply{0.0}; // IDA-units; always equals ledger.total()
    int64_t epoch{0};
    HoldersLedger ledger;
    std::vector<FeeState> fee_states;     // parallel to pools
    std::vector<PMOPoolState> pmo_states; // parallel to pools
    std::vector<double> cs_history;       // recent CS values, trimmed by the harness

    // TR_t: the protocol's fee reserve, held as IDA inside the ledger.
    double treasury() const {
        auto it = ledger.balances.find(kTreasuryAccount);
        return it == ledger.balances.end() ? 0.0 : it->second;
    }

    const PoolState* find_pool(uint32_t asset_id) const {
        for (const auto& p : pools)
            if (p.asset.id == asset_id) return &p;
        return nullptr;
    }
    PoolState* find_pool(uint32_t asset_id) {
        for (auto& p : pools)
            if (p.asset.id == asset_id) return &p;
        return nullptr;
    }
};

} // namespace ida
