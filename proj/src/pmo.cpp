#include "ida/pmo.hpp"

#include "ida/accounting.hpp"
#include "ida/errors.hpp"
#include "ida/log.hpp"

#include <algorithm>
#include <cmath>

namespace ida {

void PMOParams::validate() const {
    if (!(m_threshold > 0.0)) raise(ErrCode::config_error, "m_threshold must be positive");
    if (n_wait_epochs < 1) raise(ErrCode::config_error, "n_wait_epochs must be >= 1");
    if (t0_rounds < 1) raise(ErrCode::config_error, "t0_rounds must be >= 1");
    if (!(k_scale > 0.0)) raise(ErrCode::config_error, "k_scale must be positive");
}

double conversion_fraction_poly(double util, int rounds, const PMOParams& params) {
    const double t = static_cast<double>(rounds);
    const double ratio = t / static_cast<double>(params.t0_rounds);
    const double e1 = std::min(std::max(ratio, 1.0) - 1.0, 1.0);
    const double e2 = 1.0 + std::max(ratio - 1.0, 0.0);
    const double h = params.k_scale * (1.0 + std::pow(util, e1)) * std::pow(t, e2);
    return std::clamp(h, 0.0, 1.0);
}

double conversion_fraction_saturated(double accounting_state, double supply) {
    if (!(supply > 0.0)) raise(ErrCode::zero_supply, "saturated fraction needs positive supply");
    if (accounting_state >= 0.0) return 0.0;
    return std::min(-accounting_state / supply, 1.0);
}

double conversion_fraction_logistic(double util, int rounds, const PMOParams& params) {
    const double t = static_cast<double>(rounds);
    const double h =
        params.k_scale * util / (1.0 + std::exp(-params.logistic_a * (t - params.logistic_b)));
    return std::clamp(h, 0.0, 1.0);
}

ConversionPrice conversion_price(const PoolState& pool, ConversionRegime regime) {
    if (regime == ConversionRegime::first_interval) {
        return ConversionPrice{1.0 / pool.local_price, pool.local_price};
    }
    const double owed = -pool.accounting_state;
    const double oi = open_inventory(pool);
    if (!(owed > 0.0))
        raise(ErrCode::invalid_accounting_state,
              "second-interval price needs negative accounting state");
    if (!(oi > 0.0))
        raise(ErrCode::invalid_accounting_state,
              "second-interval price needs positive open inventory");
    return ConversionPrice{oi / owed, owed / oi};
}

namespace {

double variant_fraction(double util, int rounds, const PMOParams& params) {
    return params.variant == PMOParams::Variant::polynomial
               ? conversion_fraction_poly(util, rounds, params)
               : conversion_fraction_logistic(util, rounds, params);
}

} // namespace

std::pair<PMOPoolState, PMOAction> pmo_step(double pool_util, double n_threshold,
                                            const PMOPoolState& pmo_state,
                                            const PMOParams& params, int64_t epoch,
                                            const PoolState& pool, double supply) {
    PMOPoolState next = pmo_state;
    PMOAction action;
    action.pool = pool.asset;

    if (pool_util >= params.m_threshold) {
        action.kind = PMOActionKind::execute;
        action.regime = ConversionRegime::second_interval;
        action.fraction = supply > 0.0 ? conversion_fraction_saturated(pool.accounting_state, supply)
                                       : 0.0;
        action.price = action.fraction > 0.0
                           ? conversion_price(pool, ConversionRegime::second_interval)
                           : ConversionPrice{1.0 / pool.local_price, pool.local_price};
        next.pending_since.reset();
        next.announced_fraction.reset();
        next.rounds_above = 0;
        return {next, action};
    }

    if (next.pending_since) {
        if (pool_util < n_threshold) {
            action.kind = PMOActionKind::rescind;
            action.fraction = next.announced_fraction.value_or(0.0);
            next.pending_since.reset();
            next.announced_fraction.reset();
            next.rounds_above = 0;
            return {next, action};
        }
        const int64_t elapsed = epoch - *next.pending_since;
        if (elapsed >= params.n_wait_epochs) {
            action.kind = PMOActionKind::execute;
            action.regime = ConversionRegime::first_interval;
            action.fraction = next.announced_fraction.value_or(0.0);
            action.price = conversion_price(pool, ConversionRegime::first_interval);
            next.pending_since.reset();
            next.announced_fraction.reset();
            next.rounds_above = 0;
            return {next, action};
        }
        // Still waiting; count completed rounds spent above the threshold.
        if (elapsed > 0 && elapsed % params.n_wait_epochs == 0) next.rounds_above += 1;
        return {next, action};
    }

    if (pool_util >= n_threshold) {
        next.rounds_above += 1;
        next.pending_since = epoch;
        next.announced_fraction = variant_fraction(pool_util, next.rounds_above, params);
        action.kind = PMOActionKind::announce;
        action.fraction = *next.announced_fraction;
        action.price = conversion_price(pool, ConversionRegime::first_interval);
        return {next, action};
    }

    // Idle below N: the above-threshold streak is broken.
    next.rounds_above = 0;
    return {next, action};
}

SystemState execute_conversion(SystemState system, const AssetId& pool_id, double fraction,
                               const ConversionPrice& price, ConversionOutcome* outcome) {
    ConversionOutcome out;
    if (outcome) *outcome = out;
    if (!(fraction > 0.0)) return system;

    PoolState* pool = system.find_pool(pool_id.id);
    if (!pool) raise(ErrCode::config_error, "execute_conversion: unknown pool " + pool_id.symbol);
    if (!(price.assets_per_ida > 0.0))
        raise(ErrCode::invalid_accounting_state, "conversion price must be positive");

    const double cs_before = system.circulating_supply;
    double burned = fraction * cs_before;
    double delta_inventory = burned * price.assets_per_ida;

    const double available = std::max(open_inventory(*pool), 0.0);
    double fraction_eff = fraction;
    if (delta_inventory > available) {
        // M-regime mispricing: convert what the pool can back.
        delta_inventory = available;
        burned = delta_inventory / price.assets_per_ida;
        fraction_eff = cs_before > 0.0 ? burned / cs_before : 0.0;
        out.truncated = true;
        log::warn("conversion truncated to available open inventory in pool " + pool_id.symbol);
    }
    if (!(fraction_eff > 0.0)) {
        if (outcome) *outcome = out;
        return system;
    }

    // Pro-rata debit of every holder; LP tokens credited by pre-conversion
    // share. The scaling runs in long double so that post/pre ratios agree
    // across accounts to within one double ulp.
    const long double keep = 1.0L - static_cast<long double>(fraction_eff);
    double new_total = 0.0;
    for (auto& [account, balance] : system.ledger.balances) {
        const double share = cs_before > 0.0 ? balance / cs_before : 0.0;
        balance = static_cast<double>(static_cast<long double>(balance) * keep);
        new_total += balance;
        if (share > 0.0)
            system.ledger.lp_tokens[account][pool_id.symbol] += delta_inventory * share;
    }
    const double burned_exact = system.circulating_supply - new_total;
    system.circulating_supply = new_total;

    pool->lp_inventory += delta_inventory;
    pool->accounting_state += burned_exact;

    out.burned = burned_exact;
    out.delta_inventory = delta_inventory;
    out.fraction_effective = fraction_eff;
    if (outcome) *outcome = out;
    return system;
}

} // namespace ida
