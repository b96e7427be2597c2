#include "ida/errors.hpp"

namespace ida {

const char* err_name(ErrCode c) {
    switch (c) {
    case ErrCode::zero_collateral: return "ZeroCollateral";
    case ErrCode::zero_supply: return "ZeroSupply";
    case ErrCode::no_positive_oi: return "NoPositiveOI";
    case ErrCode::zero_denominator: return "ZeroDenominator";
    case ErrCode::zero_mean: return "ZeroMean";
    case ErrCode::insufficient_history: return "InsufficientHistory";
    case ErrCode::empty_sample: return "EmptySample";
    case ErrCode::dimension_mismatch: return "DimensionMismatch";
    case ErrCode::no_counterparts: return "NoCounterparts";
    case ErrCode::zero_assets: return "ZeroAssets";
    case ErrCode::invalid_accounting_state: return "InvalidAccountingState";
    case ErrCode::config_error: return "ConfigError";
    }
    return "UnknownError";
}

} // namespace ida
