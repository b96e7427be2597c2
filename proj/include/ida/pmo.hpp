// Prudential Market Operations: per-pool announce -> wait N_h epochs ->
// rescind-or-execute machine, conversion fraction formulas, conversion
// pricing, and the ledger/inventory reallocation of executed conversions.
#pragma once

#include "ida/state.hpp"

#include <utility>

namespace ida {

struct PMOParams {
    double m_threshold{0.95}; // M_t: utilization compelling immediate conversion
    int n_wait_epochs{5};     // N_h: epochs between announce and execution
    int t0_rounds{10};        // T_0: rounds before the escalation regime
    double k_scale{0.001};    // k: conversion rate scale

    enum class Variant { polynomial, logistic };
    Variant variant{Variant::polynomial};
    double logistic_a{1.0};
    double logistic_b{0.0};

    void validate() const; // throws config_error
};

// Conversion price in both conventions. assets_per_ida drives the conversion
// itself; quote is the peg-per-asset figure logged alongside the local price.
struct ConversionPrice {
    double assets_per_ida{0.0};
    double quote{0.0};
};

enum class ConversionRegime { first_interval, second_interval };

enum class PMOActionKind { none, announce, rescind, execute };

struct PMOAction {
    PMOActionKind kind{PMOActionKind::none};
    double fraction{0.0};
    ConversionPrice price{};
    AssetId pool{};
    ConversionRegime regime{ConversionRegime::first_interval};
};

// First interval of the conversion schedule: H = k * (1 + U^e1) * T^e2 with
// e1 = min(max(T/T0, 1) - 1, 1) and e2 = 1 + max(T/T0 - 1, 0), clamped to
// [0, 1].
double conversion_fraction_poly(double util, int rounds, const PMOParams& params);

// Saturated regime: min(-A / CS, 1); zero when A >= 0.
// Throws zero_supply when supply is not positive.
double conversion_fraction_saturated(double accounting_state, double supply);

// Logistic alternative for the first interval: k * U / (1 + exp(-a (T - b))),
// clamped to [0, 1].
double conversion_fraction_logistic(double util, int rounds, const PMOParams& params);

// first_interval: local market price. second_interval: open inventory over
// the IDA owed against the pool; throws invalid_accounting_state when
// -A <= 0 or open inventory <= 0.
ConversionPrice conversion_price(const PoolState& pool, ConversionRegime regime);

// One epoch of the per-pool machine:
//   util >= M              -> immediate execute (saturated fraction, 2nd-interval price)
//   N <= util < M, idle    -> announce; fraction frozen from the selected variant
//   pending, util < N      -> rescind (covers the whole waiting window)
//   pending, N_h elapsed   -> execute the frozen fraction at 1st-interval price
//   otherwise              -> none
// rounds_above counts announce events and round boundaries while util stays
// above N; it resets on rescind, execute, or an idle epoch below N.
std::pair<PMOPoolState, PMOAction> pmo_step(double pool_util, double n_threshold,
                                            const PMOPoolState& pmo_state,
                                            const PMOParams& params, int64_t epoch,
                                            const PoolState& pool, double supply);

struct ConversionOutcome {
    double burned{0.0};          // IDA-units removed from circulation
    double delta_inventory{0.0}; // asset-units moved from open inventory to LP claims
    double fraction_effective{0.0};
    bool truncated{false}; // insufficient open inventory; execution truncated
};

// Apply an executed conversion: debit every ledger balance pro rata, shrink
// circulating supply, credit LP tokens, and move delta_inventory from open
// inventory to LP inventory. Truncates to the available open inventory and
// flags the outcome when the priced conversion exceeds it.
SystemState execute_conversion(SystemState system, const AssetId& pool, double fraction,
                               const ConversionPrice& price, ConversionOutcome* outcome = nullptr);

} // namespace ida
