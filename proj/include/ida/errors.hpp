// Error taxonomy shared across the simulator.
#pragma once

#include <stdexcept>
#include <string>

namespace ida {

enum class ErrCode {
    zero_collateral,
    zero_supply,
    no_positive_oi,
    zero_denominator,
    zero_mean,
    insufficient_history,
    empty_sample,
    dimension_mismatch,
    no_counterparts,
    zero_assets,
    invalid_accounting_state,
    config_error,
};

const char* err_name(ErrCode c);

class Error : public std::runtime_error {
public:
    Error(ErrCode code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code) {}
    ErrCode code() const { return code_; }

private:
    ErrCode code_;
};

[[noreturn]] inline void raise(ErrCode code, const std::string& msg) { throw Error(code, msg); }

} // namespace ida
