#include "ida/accounting.hpp"

#include "ida/errors.hpp"

#include <cmath>

namespace ida {

double open_inventory(const PoolState& pool) {
    return pool.inventory - pool.lp_inventory;
}

double utilization_rate(const PoolState& pool) {
    const double oi = open_inventory(pool);
    if (!(pool.collateral_long > 0.0)) {
        if (oi == 0.0) return 0.0;
        raise(ErrCode::zero_collateral,
              "pool " + pool.asset.symbol + " has open inventory but no long collateral");
    }
    return oi / (pool.collateral_long / pool.coll_rate);
}

double positive_oi_nominal(const SystemState& system) {
    double s = 0.0;
    for (const auto& p : system.pools) {
        const double oi = open_inventory(p);
        if (oi > 0.0) s += p.density.nominal(oi);
    }
    return s;
}

double net_oi_nominal(const SystemState& system) {
    double pos = 0.0, neg = 0.0;
    for (const auto& p : system.pools) {
        const double oi = open_inventory(p);
        if (oi > 0.0)
            pos += p.density.nominal(oi);
        else if (oi < 0.0)
            neg += p.density.nominal(-oi);
    }
    return pos - neg;
}

double circulating_supply_nominal(const SystemState& system) {
    return net_oi_nominal(system);
}

namespace {

double prorated_collateral_nominal(const SystemState& system, CollateralScope scope) {
    const double pos = positive_oi_nominal(system);
    if (!(pos > 0.0)) raise(ErrCode::no_positive_oi, "no pool has positive open inventory");
    double coll = 0.0;
    for (const auto& p : system.pools) {
        if (scope == CollateralScope::positive_oi_only && !(open_inventory(p) > 0.0)) continue;
        coll += p.density.nominal(p.collateral_long);
    }
    return coll * (net_oi_nominal(system) / pos);
}

} // namespace

double attributable_assets(const SystemState& system, CollateralScope scope) {
    return net_oi_nominal(system) + prorated_collateral_nominal(system, scope);
}

double coverage_ratio(const SystemState& system, CollateralScope scope) {
    if (!(system.circulating_supply > 0.0))
        raise(ErrCode::zero_supply, "coverage ratio undefined at zero circulating supply");
    return attributable_assets(system, scope) / system.circulating_supply;
}

double capital_efficiency(const SystemState& system, CollateralScope scope) {
    if (system.circulating_supply == 0.0) return 0.0;
    const double denom = prorated_collateral_nominal(system, scope);
    if (!(denom > 0.0))
        raise(ErrCode::zero_denominator, "prorated collateral nominal is not positive");
    return system.circulating_supply / denom;
}

double capital_efficiency_approx(const SystemState& system, CollateralScope scope) {
    double num = 0.0, den = 0.0;
    for (const auto& p : system.pools) {
        if (scope == CollateralScope::positive_oi_only && !(open_inventory(p) > 0.0)) continue;
        num += p.density.nominal(utilization_rate(p) * p.collateral_long / p.coll_rate);
        den += p.density.nominal(p.collateral_long);
    }
    if (!(den > 0.0)) raise(ErrCode::zero_denominator, "no collateral in scope");
    return num / den;
}

double inventory_gap_to_target(const PoolState& pool, double target_u) {
    return open_inventory(pool) - target_u * pool.collateral_long / pool.coll_rate;
}

double balance_sheet_residual(const SystemState& system) {
    double assets = 0.0, liabilities = 0.0;
    for (const auto& p : system.pools) {
        const double vaults =
            p.density.nominal(p.collateral_long) + p.density.nominal(p.collateral_short);
        assets += p.density.nominal(p.inventory) + vaults;
        // sLP claims equal the vault contents.
        liabilities += p.density.nominal(p.lp_inventory) + vaults;
    }
    liabilities += system.circulating_supply;
    return assets - liabilities;
}

} // namespace ida
