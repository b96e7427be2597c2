// Scenario configuration: the seeded description of pools, policy, price
// dynamics, and agent behavior that fully determines a run. Configs merge
// onto built-in defaults; unknown keys and malformed overrides are hard
// errors with field-path diagnostics.
#pragma once

#include "ida/accounting.hpp"
#include "ida/fee.hpp"
#include "ida/levers.hpp"
#include "ida/optimizer.hpp"
#include "ida/pmo.hpp"
#include "ida/price_path.hpp"
#include "ida/risk.hpp"
#include "ida/state.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace ida {

struct PoolInit {
    std::string symbol{"X"};
    double inventory{1100.0};
    double lp_inventory{1000.0};
    double collateral_long{200.0};
    double collateral_short{50.0};
    double coll_rate{0.5};
    double price{1.0};
    double depth_slope{0.0};
    // price dynamics
    double drift{0.0};
    double volatility{0.0};
    double jump_intensity{0.0};
    double jump_mean{0.0};
    double jump_sigma{0.0};
};

struct PolicyParams {
    double target_util{0.5};        // U*, the cross-pool target
    double fee_treasury_share{0.3}; // slice of collected fees minted to the treasury
    CollateralScope collateral_scope{CollateralScope::all_pools};
    FeeParams fee;
    PMOParams pmo;
    LeverParams lever;
    CorrAdjustParams corr_adjust;
    ESParams es;
};

struct TraderModel {
    bool enabled{true};
    double buy_volume{5.0};  // peg-units per epoch before noise
    double sell_volume{5.0}; // IDA-units per epoch before noise
    double volume_sigma{0.0};
    double elasticity{200.0}; // logit sensitivity to the quoted fee
};

struct PLPModel {
    bool enabled{false};
    double flow_scale{0.0}; // stdev of the relative deposit/withdraw noise
};

struct SLPModel {
    bool enabled{false};
    double response_gain{0.1};
    int vol_window{16};
    double noise_scale{0.0};
};

struct HoarderModel {
    int population{0};
    double hold_utility{1.0};
    double hold_utility_spread{0.0}; // agent k holds at base + spread * k / (pop - 1)
    double sell_utility{0.5};
    double cost_expectation_gain{10.0}; // maps announced H to expected hoarding cost
    double ida_share{0.0};              // slice of initial CS spread across hoarders
};

struct ScriptedTrade {
    int64_t epoch{0};
    std::string pool;
    TradeSide side{TradeSide::buy};
    double nominal{0.0};
};

struct AuctionParams {
    bool enabled{false};
    int trigger_epochs{8};      // consecutive epochs above target before firing
    double premium_rate{0.001}; // of the gap nominal
    double fill_fraction{0.25}; // of the inventory gap
    int gate_epochs{1};         // IDA trading bar after a fill
};

struct InitialAllocation {
    double treasury_share{0.02};
    double rebalancer_share{0.1};
};

struct ScenarioConfig {
    uint64_t seed{1};
    int64_t horizon{100};
    std::vector<PoolInit> assets;
    PolicyParams policy;
    TraderModel traders;
    PLPModel plp;
    SLPModel slp;
    HoarderModel hoarders;
    std::vector<ScriptedTrade> scripted;
    AuctionParams auction;
    InitialAllocation initial;
    int optimize_refresh{0}; // epochs between target refreshes; 0 disables
    // Where refreshed dU adjustments come from: the grid optimizer, or the
    // correlation-driven tan response directly.
    enum class DuSource { optimizer, correlation };
    DuSource du_source{DuSource::optimizer};
    int corr_window{32};   // realized-return window for the correlation matrix
    std::string corr_file; // optional externally injected matrix
    SearchConfig search;

    void validate() const; // throws config_error with field paths
    PriceModel price_model() const;
};

// Resolved defaults as JSON; the single schema source for merging and
// override validation.
nlohmann::json config_defaults();

// Merge a user config onto the defaults. Unknown keys anywhere are errors.
nlohmann::json merge_config(const nlohmann::json& user);

// Apply one "dotted.path=value" override; every path segment must already
// exist. Values parse as JSON when possible, else as strings.
void apply_override(nlohmann::json& resolved, const std::string& spec);

ScenarioConfig config_from_json(const nlohmann::json& resolved);
nlohmann::json config_to_json(const ScenarioConfig& config);

// Load file -> merge -> apply overrides -> parse -> validate.
ScenarioConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

} // namespace ida
