// Asset-specific differential AMM fee: a four-case piecewise schedule around
// the target utilization, with per-pool fee memory for the sell-side decay
// case.
#pragma once

#include "ida/state.hpp"

namespace ida {

enum class TradeSide { buy, sell };

struct FeeParams {
    double theta_0{0.01};     // base fee
    double theta_floor{0.001}; // minimum fee, reached at the target utilization
    double d_impact{1.0};      // deviation impact above target (buy side)
    double theta_cap{1.0};     // upper clamp

    void validate() const; // throws config_error
};

// First-epoch seed: (theta_0, target_u + 1e-6). The epsilon keeps the
// sell-above-target case well defined before any history exists.
FeeState initial_fee_state(const FeeParams& params, double target_u);

struct FeeQuote {
    double fee{0.0};
    // Sell side above target with prev_util == target: division by zero in
    // the decay term. The quote falls back to theta_floor and the caller
    // should log a warning event.
    bool degenerate_history{false};
};

// Evaluate the piecewise fee at the pool's pre-trade utilization. Pools with
// negative or nil open inventory (util <= 0) pay the base fee. Output is
// clamped to [theta_floor, theta_cap]; the sell-above-target case is further
// bounded by prev_fee.
FeeQuote differential_fee(double util, TradeSide side, double target_u, const FeeState& state,
                          const FeeParams& params);

FeeState update_fee_state(const FeeState& state, double new_fee, double new_util);

} // namespace ida
