#include "ida/harness.hpp"

#include "ida/accounting.hpp"
#include "ida/errors.hpp"
#include "ida/fee.hpp"
#include "ida/levers.hpp"
#include "ida/log.hpp"
#include "ida/pmo.hpp"
#include "ida/price_path.hpp"
#include "ida/risk.hpp"
#include "ida/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace ida {

using nlohmann::json;

// ----------------------------- output formats ------------------------------

std::string MetricsTable::to_csv() const {
    std::ostringstream out;
    out << "epoch";
    for (const auto& s : symbols)
        out << ",util_" << s << ",fee_" << s << ",collateral_" << s << ",oi_" << s << ",n_" << s
            << ",pmo_" << s;
    out << ",cs,treasury,coverage_ratio,capital_efficiency,es_estimate,psi,delta_no,delta_mn\n";
    for (const auto& r : rows) {
        out << r.epoch;
        for (const auto& p : r.pools) {
            out << ',' << fmt_double(p.util) << ',' << fmt_double(p.fee) << ','
                << fmt_double(p.collateral) << ',' << fmt_double(p.oi) << ','
                << fmt_double(p.n_threshold) << ',' << p.pmo_action;
        }
        out << ',' << fmt_double(r.cs) << ',' << fmt_double(r.treasury) << ','
            << fmt_double(r.coverage_ratio) << ',' << fmt_double(r.capital_efficiency) << ','
            << fmt_double(r.es_estimate) << ',' << fmt_double(r.psi) << ','
            << fmt_double(r.delta_no) << ',' << fmt_double(r.delta_mn) << '\n';
    }
    return out.str();
}

std::string EventLog::to_jsonl() const {
    std::ostringstream out;
    for (const auto& e : events) out << e.dump() << '\n';
    return out.str();
}

// ------------------------------ initial state ------------------------------

SystemState initial_state(const ScenarioConfig& config) {
    SystemState st;
    for (size_t i = 0; i < config.assets.size(); ++i) {
        const auto& a = config.assets[i];
        PoolState p;
        p.asset = AssetId{static_cast<uint32_t>(i), a.symbol};
        p.inventory = a.inventory;
        p.lp_inventory = a.lp_inventory;
        p.collateral_long = a.collateral_long;
        p.collateral_short = a.collateral_short;
        p.coll_rate = a.coll_rate;
        p.local_price = a.price;
        p.density = LiquidityDensity{a.price, a.depth_slope};
        p.accounting_state = -p.density.nominal(open_inventory(p));
        st.pools.push_back(p);
        st.fee_states.push_back(initial_fee_state(config.policy.fee, config.policy.target_util));
        st.pmo_states.push_back(PMOPoolState{});
    }

    const double cs = net_oi_nominal(st);
    if (cs < 0.0)
        raise(ErrCode::config_error, "initial pools carry net negative open inventory");
    st.circulating_supply = cs;

    const double treasury = config.initial.treasury_share * cs;
    const double rebalancer = config.initial.rebalancer_share * cs;
    const double hoard_total = config.hoarders.ida_share * cs;
    double allocated = 0.0;
    if (treasury > 0.0) {
        st.ledger.balances[kTreasuryAccount] = treasury;
        allocated += treasury;
    }
    if (rebalancer > 0.0) {
        st.ledger.balances[kRebalancerAccount] = rebalancer;
        allocated += rebalancer;
    }
    if (config.hoarders.population > 0 && hoard_total > 0.0) {
        const double each = hoard_total / config.hoarders.population;
        for (int k = 0; k < config.hoarders.population; ++k) {
            st.ledger.balances["hoarder_" + std::to_string(k)] = each;
            allocated += each;
        }
    }
    st.ledger.balances[kMarketAccount] = cs - allocated;
    st.circulating_supply = st.ledger.total();
    st.cs_history.push_back(st.circulating_supply);
    return st;
}

// ------------------------------- trade legs --------------------------------

namespace {

struct TradeExec {
    double nominal{0.0}; // peg value moved (pre-fee)
    double fee_rate{0.0};
    double units{0.0};
    bool executed{false};
};

// Buy of IDA against pool i: the trader deposits assets worth `nominal`,
// receives (1 - fee) * nominal of fresh IDA; the fee is minted to the
// treasury and accrued to LPs per the configured split.
TradeExec apply_buy(SystemState& st, size_t pool_index, double nominal,
                    const std::string& account, double fee_rate, double treasury_share) {
    TradeExec ex;
    if (!(nominal > 0.0)) return ex;
    PoolState& pool = st.pools[pool_index];
    const double price = pool.density.price;
    const double units = nominal / price;

    const double minted_trader = (1.0 - fee_rate) * nominal;
    const double minted_treasury = treasury_share * fee_rate * nominal;
    const double lp_fee_units = ((1.0 - treasury_share) * fee_rate * nominal) / price;

    pool.inventory += units;
    pool.lp_inventory += lp_fee_units;
    st.ledger.balances[account] += minted_trader;
    if (minted_treasury > 0.0) st.ledger.balances[kTreasuryAccount] += minted_treasury;
    const double minted = minted_trader + minted_treasury;
    st.circulating_supply += minted;
    pool.accounting_state -= minted;

    ex.nominal = nominal;
    ex.fee_rate = fee_rate;
    ex.units = units;
    ex.executed = true;
    return ex;
}

// Sell of IDA against pool i: `nominal` IDA is burned from the account, the
// trader withdraws (1 - fee) worth of inventory. Truncated by the account
// balance and by the pool's inventory.
TradeExec apply_sell(SystemState& st, size_t pool_index, double nominal,
                     const std::string& account, double fee_rate, double treasury_share) {
    TradeExec ex;
    PoolState& pool = st.pools[pool_index];
    auto it = st.ledger.balances.find(account);
    if (it == st.ledger.balances.end()) return ex;
    double q = std::min(nominal, it->second);
    if (!(q > 0.0)) return ex;

    const double price = pool.density.price;
    double out_units = (1.0 - fee_rate) * q / price;
    if (out_units > pool.inventory) {
        out_units = pool.inventory;
        q = out_units * price / (1.0 - fee_rate);
    }
    if (!(q > 0.0)) return ex;

    const double minted_treasury = treasury_share * fee_rate * q;
    const double lp_fee_units = ((1.0 - treasury_share) * fee_rate * q) / price;

    it->second -= q;
    if (minted_treasury > 0.0) st.ledger.balances[kTreasuryAccount] += minted_treasury;
    pool.inventory -= out_units;
    pool.lp_inventory += lp_fee_units;
    const double cs_delta = -q + minted_treasury;
    st.circulating_supply += cs_delta;
    pool.accounting_state -= cs_delta;

    ex.nominal = q;
    ex.fee_rate = fee_rate;
    ex.units = out_units;
    ex.executed = true;
    return ex;
}

// Logit routing over quoted fees; gated or capacity-less pools get zero
// weight.
std::vector<double> route_weights(const std::vector<double>& fees,
                                  const std::vector<bool>& eligible, double elasticity) {
    std::vector<double> w(fees.size(), 0.0);
    double best = 0.0;
    bool any = false;
    for (size_t i = 0; i < fees.size(); ++i)
        if (eligible[i] && (!any || -elasticity * fees[i] > best)) {
            best = -elasticity * fees[i];
            any = true;
        }
    if (!any) return w;
    double total = 0.0;
    for (size_t i = 0; i < fees.size(); ++i) {
        if (!eligible[i]) continue;
        w[i] = std::exp(-elasticity * fees[i] - best);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

} // namespace

// ------------------------------ auction stub -------------------------------

AuctionFill rebalancing_auction_stub(SystemState& state, size_t pool_index, double target_util,
                                     const AuctionParams& params) {
    AuctionFill fill;
    PoolState& pool = state.pools[pool_index];
    const double util = utilization_rate(pool);
    if (!(util > target_util)) return fill;

    const double gap_units = inventory_gap_to_target(pool, target_util);
    if (!(gap_units > 0.0)) return fill;

    const double treasury = state.treasury();
    if (!(treasury > 0.0)) {
        fill.blocked_no_treasury = true;
        return fill;
    }

    const double gap_nominal = pool.density.nominal(gap_units);
    const double premium_full = params.premium_rate * gap_nominal;
    const double premium = std::min(premium_full, treasury);
    const double scale = premium_full > 0.0 ? premium / premium_full : 1.0;

    const double price = pool.density.price;
    double delta = params.fill_fraction * gap_units * scale;
    delta = std::min(delta, pool.inventory);
    const double rebalancer_funds = [&] {
        auto it = state.ledger.balances.find(kRebalancerAccount);
        return it == state.ledger.balances.end() ? 0.0 : it->second;
    }();
    delta = std::min(delta, rebalancer_funds / price);
    if (!(delta > 0.0)) return fill;

    // Rebalancer buys the fill at the external price with IDA, then receives
    // the premium from the treasury.
    const double ida_paid = delta * price;
    state.ledger.balances[kRebalancerAccount] -= ida_paid;
    state.circulating_supply -= ida_paid;
    pool.inventory -= delta;
    pool.accounting_state += ida_paid;

    const double paid_premium = std::min(premium, state.treasury());
    state.ledger.balances[kTreasuryAccount] -= paid_premium;
    state.ledger.balances[kRebalancerAccount] += paid_premium;

    fill.fired = true;
    fill.delta_units = delta;
    fill.ida_paid = ida_paid;
    fill.premium = paid_premium;
    return fill;
}

// -------------------------------- simulation -------------------------------

Simulation::Simulation(const ScenarioConfig& config)
    : config_(config),
      state_(initial_state(config)),
      es_estimate_(std::numeric_limits<double>::quiet_NaN()),
      agent_rng_(substream_seed(config.seed, 0xA6E)) {
    config_.validate();
    std::vector<double> initial_prices;
    for (const auto& a : config_.assets) initial_prices.push_back(a.price);
    price_path_ = generate_price_path(config_.price_model(), initial_prices,
                                      static_cast<int>(config_.horizon),
                                      substream_seed(config_.seed, 0x9A7));
    auction_above_.assign(state_.pools.size(), 0);
    ida_gate_until_.assign(state_.pools.size(), -1);
    per_pool_targets_.assign(state_.pools.size(), config_.policy.target_util);
    slp_base_.clear();
    for (const auto& p : state_.pools) slp_base_.push_back(p.collateral_long);
    plan_.collateral_targets = slp_base_;
    plan_.du_adjustments.assign(state_.pools.size(), 0.0);
    plan_.per_pool_targets = per_pool_targets_;
    price_history_.push_back(initial_prices);
    for (const auto& s : state_.pools) metrics_.symbols.push_back(s.asset.symbol);
    if (!config_.corr_file.empty()) {
        CorrelationMatrix m = CorrelationMatrix::load_csv(config_.corr_file);
        if (m.size() != state_.pools.size())
            raise(ErrCode::config_error, "correlation file size does not match pool count");
        for (size_t i = 0; i < m.size(); ++i)
            if (m.symbols[i] != state_.pools[i].asset.symbol)
                raise(ErrCode::config_error, "correlation file symbols must match pool order");
        injected_corr_ = std::move(m);
    }
}

CorrelationMatrix Simulation::current_correlation() const {
    if (injected_corr_) return *injected_corr_;
    std::vector<std::string> syms;
    for (const auto& p : state_.pools) syms.push_back(p.asset.symbol);
    const size_t need = static_cast<size_t>(config_.corr_window) + 1;
    if (price_history_.size() < 3) return CorrelationMatrix::identity(std::move(syms));
    const size_t take = std::min(price_history_.size(), need);
    const size_t start = price_history_.size() - take;
    std::vector<std::vector<double>> returns;
    for (size_t t = start + 1; t < price_history_.size(); ++t) {
        std::vector<double> row(syms.size());
        for (size_t i = 0; i < syms.size(); ++i)
            row[i] = std::log(price_history_[t][i] / price_history_[t - 1][i]);
        returns.push_back(std::move(row));
    }
    return CorrelationMatrix::from_returns(std::move(syms), returns);
}

void Simulation::step() {
    if (done()) raise(ErrCode::config_error, "stepping past the scenario horizon");

    SystemState st = state_;
    std::vector<json> ev;
    const int64_t t = epoch_index_;
    const size_t n = st.pools.size();
    const auto& policy = config_.policy;

    auto warn_event = [&](const std::string& what) {
        ev.push_back(json{{"epoch", t}, {"type", "warning"}, {"what", what}});
        log::warn(what);
    };

    // (1) external price update; the local market tracks it.
    for (size_t i = 0; i < n; ++i) {
        st.pools[i].density.price = price_path_[i][static_cast<size_t>(t) + 1];
        st.pools[i].local_price = st.pools[i].density.price;
    }
    const double residual_post_reprice = balance_sheet_residual(st);
    std::vector<std::vector<double>> price_history = price_history_;
    {
        std::vector<double> prices;
        for (const auto& p : st.pools) prices.push_back(p.density.price);
        price_history.push_back(std::move(prices));
        const size_t keep = static_cast<size_t>(
                                std::max(config_.corr_window, config_.slp.vol_window)) +
                            2;
        if (price_history.size() > keep)
            price_history.erase(price_history.begin(),
                                price_history.end() - static_cast<long>(keep));
    }

    // Fee quotes at the pre-trade utilization, one per pool and side.
    std::vector<double> buy_fees(n), sell_fees(n), pre_util(n);
    std::vector<bool> buy_ok(n), sell_ok(n);
    std::vector<double> last_exec_fee(n, -1.0);
    for (size_t i = 0; i < n; ++i) {
        pre_util[i] = utilization_rate(st.pools[i]);
        const bool gated = ida_gate_until_[i] >= t;
        for (TradeSide side : {TradeSide::buy, TradeSide::sell}) {
            const FeeQuote q = differential_fee(pre_util[i], side, per_pool_targets_[i],
                                                st.fee_states[i], policy.fee);
            if (q.degenerate_history)
                warn_event("degenerate fee history in pool " + st.pools[i].asset.symbol);
            (side == TradeSide::buy ? buy_fees[i] : sell_fees[i]) = q.fee;
            ev.push_back(json{{"epoch", t},
                              {"type", "fee_quote"},
                              {"pool", st.pools[i].asset.symbol},
                              {"side", side == TradeSide::buy ? "buy" : "sell"},
                              {"util", pre_util[i]},
                              {"fee", q.fee}});
        }
        buy_ok[i] = !gated;
        sell_ok[i] = !gated && st.pools[i].inventory > 0.0;
        if (gated) warn_event("pool " + st.pools[i].asset.symbol + " gated for IDA trading");
    }

    auto record_trade = [&](size_t i, TradeSide side, const std::string& account,
                            const TradeExec& ex) {
        if (!ex.executed) return;
        last_exec_fee[i] = ex.fee_rate;
        ev.push_back(json{{"epoch", t},
                          {"type", "trade"},
                          {"pool", st.pools[i].asset.symbol},
                          {"side", side == TradeSide::buy ? "buy" : "sell"},
                          {"account", account},
                          {"nominal", ex.nominal},
                          {"fee", ex.fee_rate},
                          {"units", ex.units}});
    };

    // (2) trader flows: aggregate volumes routed by fee attractiveness.
    if (config_.traders.enabled) {
        const double sigma = config_.traders.volume_sigma;
        auto volume_noise = [&]() {
            if (!(sigma > 0.0)) return 1.0;
            return std::exp(sigma * agent_rng_.normal() - 0.5 * sigma * sigma);
        };
        const double buy_total = config_.traders.buy_volume * volume_noise();
        const double sell_total = config_.traders.sell_volume * volume_noise();

        const auto bw = route_weights(buy_fees, buy_ok, config_.traders.elasticity);
        for (size_t i = 0; i < n; ++i) {
            if (!(bw[i] > 0.0)) continue;
            const TradeExec ex = apply_buy(st, i, buy_total * bw[i], kMarketAccount, buy_fees[i],
                                           policy.fee_treasury_share);
            record_trade(i, TradeSide::buy, kMarketAccount, ex);
        }
        const auto sw = route_weights(sell_fees, sell_ok, config_.traders.elasticity);
        for (size_t i = 0; i < n; ++i) {
            if (!(sw[i] > 0.0)) continue;
            const TradeExec ex = apply_sell(st, i, sell_total * sw[i], kMarketAccount,
                                            sell_fees[i], policy.fee_treasury_share);
            record_trade(i, TradeSide::sell, kMarketAccount, ex);
        }
    }

    // Scripted trades pinned to this epoch.
    for (const auto& s : config_.scripted) {
        if (s.epoch != t) continue;
        size_t idx = n;
        for (size_t i = 0; i < n; ++i)
            if (st.pools[i].asset.symbol == s.pool) idx = i;
        if (idx == n) continue;
        if (ida_gate_until_[idx] >= t) {
            warn_event("scripted trade skipped: pool " + s.pool + " gated");
            continue;
        }
        if (s.side == TradeSide::buy) {
            record_trade(idx, TradeSide::buy,
                         kMarketAccount,
                         apply_buy(st, idx, s.nominal, kMarketAccount, buy_fees[idx],
                                   policy.fee_treasury_share));
        } else {
            record_trade(idx, TradeSide::sell,
                         kMarketAccount,
                         apply_sell(st, idx, s.nominal, kMarketAccount, sell_fees[idx],
                                    policy.fee_treasury_share));
        }
    }

    // (3) hoarder decisions against pending announcements. The marginal
    // hoarder sells everything once the expected conversion cost eats the
    // holding utility edge.
    if (config_.hoarders.population > 0) {
        double announced = 0.0;
        for (const auto& ps : st.pmo_states)
            if (ps.pending_since && ps.announced_fraction)
                announced = std::max(announced, *ps.announced_fraction);
        if (announced > 0.0) {
            const int pop = config_.hoarders.population;
            for (int k = 0; k < pop; ++k) {
                const std::string account = "hoarder_" + std::to_string(k);
                auto it = st.ledger.balances.find(account);
                if (it == st.ledger.balances.end() || !(it->second > 0.0)) continue;
                const double hold =
                    config_.hoarders.hold_utility +
                    config_.hoarders.hold_utility_spread *
                        (pop > 1 ? static_cast<double>(k) / (pop - 1) : 0.0);
                const double expected_cost = config_.hoarders.cost_expectation_gain * announced;
                if (!(hold - expected_cost <= config_.hoarders.sell_utility)) continue;
                const double amount = it->second;
                const auto sw = route_weights(sell_fees, sell_ok, config_.traders.elasticity);
                for (size_t i = 0; i < n; ++i) {
                    if (!(sw[i] > 0.0)) continue;
                    record_trade(i, TradeSide::sell, account,
                                 apply_sell(st, i, amount * sw[i], account, sell_fees[i],
                                            policy.fee_treasury_share));
                }
                ev.push_back(json{{"epoch", t},
                                  {"type", "hoarder_sell"},
                                  {"account", account},
                                  {"amount", amount},
                                  {"announced_fraction", announced}});
            }
        }
    }

    // (4) sLP collateral: mean reversion to a volatility-scaled target.
    if (config_.slp.enabled) {
        for (size_t i = 0; i < n; ++i) {
            PoolState& pool = st.pools[i];
            double realized = 0.0;
            const size_t window = static_cast<size_t>(config_.slp.vol_window);
            if (price_history.size() >= window + 1) {
                const size_t start = price_history.size() - window - 1;
                double mean = 0.0;
                std::vector<double> rets(window);
                for (size_t u = 0; u < window; ++u) {
                    rets[u] = std::log(price_history[start + u + 1][i] /
                                       price_history[start + u][i]);
                    mean += rets[u];
                }
                mean /= static_cast<double>(window);
                double var = 0.0;
                for (double r : rets) var += (r - mean) * (r - mean);
                realized = std::sqrt(var / static_cast<double>(window));
            }
            const double ref = config_.assets[i].volatility;
            double ratio = 1.0;
            if (ref > 0.0 && realized > 0.0) ratio = std::clamp(ref / realized, 0.25, 4.0);
            const double target = slp_base_[i] * ratio;
            double next = pool.collateral_long +
                          config_.slp.response_gain * (target - pool.collateral_long);
            if (config_.slp.noise_scale > 0.0)
                next += config_.slp.noise_scale * pool.collateral_long * agent_rng_.normal();
            pool.collateral_long = std::max(next, 1e-9);
        }
    }

    // (5) pLP flows: inventory and LP claims move together, never the open
    // position.
    if (config_.plp.enabled && config_.plp.flow_scale > 0.0) {
        for (size_t i = 0; i < n; ++i) {
            PoolState& pool = st.pools[i];
            const double flow = config_.plp.flow_scale * pool.lp_inventory * agent_rng_.normal();
            if (flow >= 0.0) {
                pool.inventory += flow;
                pool.lp_inventory += flow;
            } else {
                const double w = std::min({-flow, pool.inventory, pool.lp_inventory});
                pool.inventory -= w;
                pool.lp_inventory -= w;
            }
        }
    }

    // (6) lever recompute.
    double psi = 0.0;
    if (st.cs_history.size() >= 2) psi = supply_variance(st.cs_history);
    const double d_no = delta_no(psi, policy.lever);
    double normalizer = 0.0;
    try {
        normalizer = attributable_assets(st, policy.collateral_scope);
    } catch (const Error&) {
        normalizer = st.circulating_supply > 0.0 ? st.circulating_supply : 1.0;
    }
    if (!(normalizer > 0.0)) normalizer = 1.0;
    const double d_mn = delta_mn(st.treasury() / normalizer, policy.lever);
    std::vector<double> n_thresholds(n);
    for (size_t i = 0; i < n; ++i) {
        const ThresholdResult r =
            threshold_n(policy.pmo.m_threshold, per_pool_targets_[i], d_no, d_mn, policy.lever);
        n_thresholds[i] = r.value;
        if (r.clamped)
            warn_event("N threshold clamped into (O, M) for pool " + st.pools[i].asset.symbol);
        ev.push_back(json{{"epoch", t},
                          {"type", "lever"},
                          {"pool", st.pools[i].asset.symbol},
                          {"psi", psi},
                          {"delta_no", d_no},
                          {"delta_mn", d_mn},
                          {"n_threshold", r.value},
                          {"o_threshold", per_pool_targets_[i]},
                          {"m_threshold", policy.pmo.m_threshold},
                          {"mode",
                           policy.lever.mode == LeverParams::Mode::verbatim ? "verbatim"
                                                                            : "distance"}});
    }

    // (7) PMO per pool, conversions applied in AssetId order.
    std::vector<std::string> pmo_actions(n, "none");
    for (size_t i = 0; i < n; ++i) {
        const double util = utilization_rate(st.pools[i]);
        auto [next_pmo, action] = pmo_step(util, n_thresholds[i], st.pmo_states[i], policy.pmo,
                                           t, st.pools[i], st.circulating_supply);
        st.pmo_states[i] = next_pmo;
        if (action.kind == PMOActionKind::none) continue;
        const char* kind = action.kind == PMOActionKind::announce  ? "announce"
                           : action.kind == PMOActionKind::rescind ? "rescind"
                                                                   : "execute";
        pmo_actions[i] = kind;
        ev.push_back(json{{"epoch", t},
                          {"type", "pmo"},
                          {"pool", st.pools[i].asset.symbol},
                          {"action", kind},
                          {"fraction", action.fraction},
                          {"price", action.price.quote},
                          {"rounds_above", st.pmo_states[i].rounds_above}});
        if (action.kind == PMOActionKind::execute && action.fraction > 0.0) {
            ConversionOutcome outcome;
            const AssetId pool_id = st.pools[i].asset;
            st = execute_conversion(std::move(st), pool_id, action.fraction, action.price,
                                    &outcome);
            if (outcome.truncated)
                warn_event("conversion truncated in pool " + st.pools[i].asset.symbol);
            ev.push_back(json{{"epoch", t},
                              {"type", "conversion"},
                              {"pool", st.pools[i].asset.symbol},
                              {"burned", outcome.burned},
                              {"delta_inventory", outcome.delta_inventory},
                              {"fraction", outcome.fraction_effective},
                              {"price_assets_per_ida", action.price.assets_per_ida},
                              {"price_quote", action.price.quote},
                              {"regime",
                               action.regime == ConversionRegime::first_interval ? "first"
                                                                                 : "second"},
                              {"truncated", outcome.truncated}});
        }
    }

    // (8) rebalancing-auction stub.
    std::vector<int> auction_above = auction_above_;
    std::vector<int64_t> gate_until = ida_gate_until_;
    if (config_.auction.enabled) {
        for (size_t i = 0; i < n; ++i) {
            const double util = utilization_rate(st.pools[i]);
            auction_above[i] = util > per_pool_targets_[i] ? auction_above[i] + 1 : 0;
            if (auction_above[i] < config_.auction.trigger_epochs) continue;
            const AuctionFill fill =
                rebalancing_auction_stub(st, i, per_pool_targets_[i], config_.auction);
            if (fill.blocked_no_treasury) {
                warn_event("auction skipped for pool " + st.pools[i].asset.symbol +
                           ": treasury empty");
                auction_above[i] = 0;
                continue;
            }
            if (fill.fired) {
                gate_until[i] = t + config_.auction.gate_epochs;
                auction_above[i] = 0;
                ev.push_back(json{{"epoch", t},
                                  {"type", "auction"},
                                  {"pool", st.pools[i].asset.symbol},
                                  {"delta_units", fill.delta_units},
                                  {"ida_paid", fill.ida_paid},
                                  {"premium", fill.premium}});
            }
        }
    }

    // (9) periodic target refresh.
    TargetPlan plan = plan_;
    double regime_scale = regime_scale_;
    double es_estimate = es_estimate_;
    std::vector<double> per_pool_targets = per_pool_targets_;
    std::vector<double> slp_base = slp_base_;
    if (config_.optimize_refresh > 0 && (t + 1) % config_.optimize_refresh == 0) {
        const CorrelationMatrix corr = current_correlation();
        std::vector<double> collaterals;
        for (const auto& p : st.pools) collaterals.push_back(p.collateral_long);

        if (config_.du_source == ScenarioConfig::DuSource::optimizer) {
            OptimizerInputs inputs;
            inputs.base_target = policy.target_util;
            inputs.d_no = d_no;
            inputs.d_mn = d_mn;
            inputs.lever = policy.lever;
            inputs.price_model = config_.price_model();
            inputs.corr = corr;
            for (const auto& ps : st.pmo_states) inputs.rounds.push_back(ps.rounds_above);
            inputs.seed = substream_seed(config_.seed, 0xE5000000ULL + static_cast<uint64_t>(t));
            plan = optimize_targets(st, inputs, policy.es, policy.pmo, config_.search);
            if (!plan.feasible)
                warn_event("optimizer found no plan inside the ES cap; using min-ES plan");
        } else {
            // Correlation-driven lever: dU from the tan response, collateral
            // targets stay where the sLP market put them.
            plan.collateral_targets = collaterals;
            plan.du_adjustments.assign(n, 0.0);
            plan.per_pool_targets.assign(n, policy.target_util);
            try {
                const auto weights = asset_weights(st);
                for (size_t i = 0; i < n; ++i) {
                    const double rho = weighted_correlation(i, corr, collaterals);
                    plan.du_adjustments[i] =
                        utilization_adjustment(rho, weights[i], policy.corr_adjust);
                }
            } catch (const Error& e) {
                warn_event(std::string("correlation lever skipped: ") + e.what());
            }
            const auto losses = simulate_losses(
                st, plan, config_.price_model(), corr,
                substream_seed(config_.seed, 0xE5000000ULL + static_cast<uint64_t>(t)),
                policy.es);
            plan.es = expected_shortfall(losses, policy.es.alpha_conf).es;
            plan.feasible = plan.es < policy.es.es_cap;
            plan.objective = 1.0;
        }

        es_estimate = plan.es;
        double att = 0.0;
        try {
            att = attributable_assets(st, policy.collateral_scope);
        } catch (const Error&) {
            att = st.circulating_supply;
        }
        regime_scale = regime_scaling(att > 0.0 ? es_estimate / att : 0.0, policy.es);

        for (size_t i = 0; i < n; ++i) {
            const double du_eff = regime_scale * plan.du_adjustments[i];
            PerPoolTarget target = per_pool_target(policy.target_util, du_eff);
            if (target.clamped)
                warn_event("per-pool target clamped for pool " + st.pools[i].asset.symbol);
            per_pool_targets[i] =
                std::min(target.value, policy.pmo.m_threshold * (1.0 - 1e-9));
            plan.per_pool_targets[i] = per_pool_targets[i];
        }
        slp_base = plan.collateral_targets;
        ev.push_back(json{{"epoch", t},
                          {"type", "plan"},
                          {"objective", plan.objective},
                          {"es", plan.es},
                          {"feasible", plan.feasible},
                          {"regime_scale", regime_scale},
                          {"du", plan.du_adjustments},
                          {"collateral_targets", plan.collateral_targets},
                          {"per_pool_targets", plan.per_pool_targets}});
    }

    // (10) metrics row and epoch bookkeeping.
    MetricsRow row;
    row.epoch = t + 1;
    for (size_t i = 0; i < n; ++i) {
        MetricsRow::PerPool pp;
        pp.util = utilization_rate(st.pools[i]);
        pp.fee = differential_fee(pp.util, TradeSide::buy, per_pool_targets[i], st.fee_states[i],
                                  policy.fee)
                     .fee;
        pp.collateral = st.pools[i].collateral_long;
        pp.oi = open_inventory(st.pools[i]);
        pp.n_threshold = n_thresholds[i];
        pp.pmo_action = pmo_actions[i];
        row.pools.push_back(pp);

        // Fee memory: last executed fee if any trade went through, and the
        // end-of-epoch utilization.
        const double fee_mem =
            last_exec_fee[i] >= 0.0 ? last_exec_fee[i] : st.fee_states[i].prev_fee;
        st.fee_states[i] = update_fee_state(st.fee_states[i], fee_mem, pp.util);
    }
    row.cs = st.circulating_supply;
    row.treasury = st.treasury();
    try {
        row.coverage_ratio = coverage_ratio(st, policy.collateral_scope);
    } catch (const Error&) {
        row.coverage_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    try {
        row.capital_efficiency = capital_efficiency(st, policy.collateral_scope);
    } catch (const Error&) {
        row.capital_efficiency = std::numeric_limits<double>::quiet_NaN();
    }
    row.es_estimate = es_estimate;
    row.psi = psi;
    row.delta_no = d_no;
    row.delta_mn = d_mn;

    st.cs_history.push_back(st.circulating_supply);
    const size_t window = static_cast<size_t>(policy.lever.variance_window);
    if (st.cs_history.size() > window)
        st.cs_history.erase(st.cs_history.begin(),
                            st.cs_history.end() - static_cast<long>(window));
    st.epoch = t + 1;

    ev.push_back(json{{"epoch", t},
                      {"type", "epoch_summary"},
                      {"residual_post_reprice", residual_post_reprice},
                      {"residual_end", balance_sheet_residual(st)},
                      {"cs", st.circulating_supply},
                      {"treasury", st.treasury()}});

    // Commit.
    state_ = std::move(st);
    price_history_ = std::move(price_history);
    auction_above_ = std::move(auction_above);
    ida_gate_until_ = std::move(gate_until);
    plan_ = std::move(plan);
    regime_scale_ = regime_scale;
    es_estimate_ = es_estimate;
    per_pool_targets_ = std::move(per_pool_targets);
    slp_base_ = std::move(slp_base);
    metrics_.rows.push_back(std::move(row));
    for (auto& e : ev) events_.events.push_back(std::move(e));
    ++epoch_index_;
}

void Simulation::run_all() {
    while (!done()) step();
}

RunOutput run_scenario(const ScenarioConfig& config) {
    Simulation sim(config);
    sim.run_all();
    return sim.output();
}

} // namespace ida
