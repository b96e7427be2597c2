#include "ida/fee.hpp"

#include "ida/errors.hpp"

#include <algorithm>

namespace ida {

void FeeParams::validate() const {
    if (!(0.0 < theta_floor && theta_floor <= theta_0 && theta_0 < theta_cap && theta_cap <= 1.0))
        raise(ErrCode::config_error,
              "fee params must satisfy 0 < theta_floor <= theta_0 < theta_cap <= 1");
    if (!(d_impact >= 0.0)) raise(ErrCode::config_error, "d_impact must be >= 0");
}

FeeState initial_fee_state(const FeeParams& params, double target_u) {
    return FeeState{params.theta_0, target_u + 1e-6};
}

FeeQuote differential_fee(double util, TradeSide side, double target_u, const FeeState& state,
                          const FeeParams& params) {
    FeeQuote q;
    if (!(util > 0.0)) {
        q.fee = params.theta_0;
        return q;
    }

    const double spread = params.theta_0 - params.theta_floor;
    double fee = 0.0;
    if (side == TradeSide::buy) {
        if (target_u >= util) {
            fee = params.theta_0 - spread * (util / target_u);
        } else {
            fee = params.theta_floor * (1.0 + params.d_impact * (util / target_u));
        }
    } else {
        if (target_u < util) {
            const double denom = state.prev_util - target_u;
            if (denom == 0.0) {
                q.degenerate_history = true;
                q.fee = params.theta_floor;
                return q;
            }
            fee = state.prev_fee -
                  (state.prev_fee - params.theta_floor) * (1.0 - (util - target_u) / denom);
            // The decay case never exceeds the previous fee.
            fee = std::min(fee, state.prev_fee);
        } else {
            fee = params.theta_floor + spread * (1.0 - util / target_u);
        }
    }
    q.fee = std::clamp(fee, params.theta_floor, params.theta_cap);
    return q;
}

FeeState update_fee_state(const FeeState& state, double new_fee, double new_util) {
    (void)state;
    return FeeState{new_fee, new_util};
}

} // namespace ida
