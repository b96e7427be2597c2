// Epoch-driven simulation harness: price evolution, agent flows, lever
// recomputation, PMO stepping, the rebalancing-auction stub, and metrics
// emission. Fully deterministic under the scenario seed.
#pragma once

#include "ida/config.hpp"
#include "ida/optimizer.hpp"
#include "ida/rng.hpp"
#include "ida/state.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ida {

struct MetricsRow {
    int64_t epoch{0};
    struct PerPool {
        double util{0.0};
        double fee{0.0};
        double collateral{0.0};
        double oi{0.0};
        double n_threshold{0.0};
        std::string pmo_action{"none"};
    };
    std::vector<PerPool> pools;
    double cs{0.0};
    double treasury{0.0};
    double coverage_ratio{0.0};
    double capital_efficiency{0.0};
    double es_estimate{0.0};
    double psi{0.0};
    double delta_no{0.0};
    double delta_mn{0.0};
};

struct MetricsTable {
    std::vector<std::string> symbols;
    std::vector<MetricsRow> rows;
    std::string to_csv() const; // stable column order, round-trip floats
};

struct EventLog {
    std::vector<nlohmann::json> events;
    std::string to_jsonl() const;
};

struct RunOutput {
    MetricsTable metrics;
    EventLog events;
    SystemState final_state;
};

// Build the epoch-0 system: pools from config, accounting states at
// -L(open inventory), circulating supply from the Eq.-4 identity, and the
// ledger split across treasury / rebalancer / hoarders / market.
SystemState initial_state(const ScenarioConfig& config);

struct AuctionFill {
    bool fired{false};
    bool blocked_no_treasury{false};
    double delta_units{0.0}; // open inventory removed
    double ida_paid{0.0};    // burned from the rebalancer account
    double premium{0.0};     // treasury -> rebalancer transfer
};

// Fill a fraction of the inventory gap at the external price against the
// rebalancer's IDA, paying the premium out of the treasury. No-op when the
// pool is at or under target or the treasury is empty.
AuctionFill rebalancing_auction_stub(SystemState& state, size_t pool_index, double target_util,
                                     const AuctionParams& params);

// One scenario run. Steps are applied in a fixed order within each epoch:
// prices, trader flows, hoarder decisions, sLP collateral, levers, PMO,
// auction stub, optional target refresh, metrics.
class Simulation {
public:
    explicit Simulation(const ScenarioConfig& config);

    // Advance one epoch. Throws on internal errors, leaving the visible
    // state exactly as before the call.
    void step();
    void run_all();

    bool done() const { return epoch_index_ >= config_.horizon; }
    const SystemState& state() const { return state_; }
    const MetricsTable& metrics() const { return metrics_; }
    const EventLog& events() const { return events_; }
    const TargetPlan& plan() const { return plan_; }

    RunOutput output() const { return RunOutput{metrics_, events_, state_}; }

private:
    ScenarioConfig config_;
    SystemState state_;
    std::vector<std::vector<double>> price_path_; // [asset][t], t in [0, horizon]
    int64_t epoch_index_{0};

    // runtime (committed together with the state at the end of each step)
    std::vector<int> auction_above_;
    std::vector<int64_t> ida_gate_until_;
    std::vector<double> per_pool_targets_;
    std::vector<double> slp_base_;
    TargetPlan plan_;
    double regime_scale_{1.0};
    double es_estimate_;
    std::vector<std::vector<double>> price_history_; // [t][asset]
    std::optional<CorrelationMatrix> injected_corr_;
    Rng agent_rng_;

    MetricsTable metrics_;
    EventLog events_;

    CorrelationMatrix current_correlation() const;
};

RunOutput run_scenario(const ScenarioConfig& config);

} // namespace ida
