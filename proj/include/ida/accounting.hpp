// Accounting identities over SystemState: open inventory, utilization,
// attribution, coverage, capital efficiency, and the balance-sheet residual.
// All functions are pure queries.
#pragma once

#include "ida/state.hpp"

namespace ida {

// Which pools contribute collateral to the attribution / efficiency
// denominators. The default prorates collateral of every pool; the alternate
// mode restricts to pools with positive open inventory.
enum class CollateralScope { all_pools, positive_oi_only };

// I - I_LP; may be negative.
double open_inventory(const PoolState& pool);

// (I - I_LP) / (C / rho). Negative when open inventory is negative.
// Throws zero_collateral when collateral_long == 0 and I != I_LP.
double utilization_rate(const PoolState& pool);

// Nominal value of positive open inventory, at external prices.
double positive_oi_nominal(const SystemState& system);

// Net open inventory nominal: positive minus negative legs.
double net_oi_nominal(const SystemState& system);

// CS identity: sum of positive-OI nominals minus sum of negative-OI nominals.
double circulating_supply_nominal(const SystemState& system);

// Net OI nominal plus prorated collateral nominal.
// Throws no_positive_oi when the positive-OI nominal is zero.
double attributable_assets(const SystemState& system,
                           CollateralScope scope = CollateralScope::all_pools);

// A_t / CS. Throws zero_supply when circulating supply is zero.
double coverage_ratio(const SystemState& system,
                      CollateralScope scope = CollateralScope::all_pools);

// CS over the prorated collateral nominal. Returns 0 when CS == 0; throws
// zero_denominator when the prorated collateral term is not positive.
double capital_efficiency(const SystemState& system,
                          CollateralScope scope = CollateralScope::all_pools);

// Approximation variant computed from utilizations and collateral:
// sum L(U * C / rho) / sum L(C).
double capital_efficiency_approx(const SystemState& system,
                                 CollateralScope scope = CollateralScope::all_pools);

// dI = I - I_LP - target_u * C / rho; adding -dI of inventory restores the
// target utilization.
double inventory_gap_to_target(const PoolState& pool, double target_u);

// Assets (inventory + collateral vaults) minus liabilities (LP claims, sLP
// collateral claims, circulating supply). sLP claims equal the vault
// contents, so collateral cancels; the residual reduces to
// sum L(I) - sum L(I_LP) - CS. Zero in a consistent closed system at static
// prices; moves only with external revaluation.
double balance_sheet_residual(const SystemState& system);

} // namespace ida
