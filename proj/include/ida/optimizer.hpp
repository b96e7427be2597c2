// ES-constrained asset-mix optimization over (collateral, dU): Monte Carlo
// loss simulation for the constraint and a bounded-grid search for the
// objective (fraction of circulating supply left unconverted).
#pragma once

#include "ida/levers.hpp"
#include "ida/pmo.hpp"
#include "ida/price_path.hpp"
#include "ida/risk.hpp"
#include "ida/state.hpp"

#include <cstdint>
#include <vector>

namespace ida {

// Everything the evaluation of a candidate plan needs besides the system
// snapshot: the lever context fixing N_t, the joint price model, and the
// per-pool PMO round counts used in the conversion fraction.
struct OptimizerInputs {
    double base_target{0.5}; // U*
    double d_no{0.05};
    double d_mn{0.05};
    LeverParams lever;
    PriceModel price_model;
    CorrelationMatrix corr;
    std::vector<int> rounds; // per-pool; values < 1 evaluate as 1
    uint64_t seed{0};
};

struct SearchConfig {
    int c_points{5};
    double c_lo_mult{0.5};
    double c_hi_mult{2.0};
    int du_points{5};
    double du_lo{-0.2};
    double du_hi{0.2};

    enum class Mode { automatic, exhaustive, coordinate };
    Mode mode{Mode::automatic};
    // automatic switches to coordinate descent above this many grid points.
    long exhaustive_limit{200000};
    int max_sweeps{50};

    void validate() const;
};

struct OptimizerGrid {
    std::vector<std::vector<double>> c_values; // per pool
    std::vector<double> du_values;             // shared across pools
};

// Candidate values: per-pool collateral spans [c_lo_mult, c_hi_mult] times
// the current collateral; dU spans [du_lo, du_hi]. Both ends inclusive.
OptimizerGrid make_grid(const SystemState& system, const SearchConfig& search);

// A dU candidate is admissible iff U* - dU lands in (0, 1) unclamped and
// stays below M.
bool du_admissible(double base_target, double du, double m_threshold);

// Monte Carlo losses of the asset base implied by the plan: per pool,
// collateral_targets plus the open inventory a pool holds at its plan target
// (U*^i C^i / rho^i), valued along correlated price paths over
// es_params.horizon epochs. Loss-positive; deterministic per seed.
std::vector<double> simulate_losses(const SystemState& system, const TargetPlan& plan,
                                    const PriceModel& price_model, const CorrelationMatrix& corr,
                                    uint64_t seed, const ESParams& es_params);

struct PlanEvaluation {
    double objective{0.0}; // 1 - sum_i H^i
    double es{0.0};
    bool feasible{false};
};

// Evaluate one candidate plan: implied utilizations, per-pool thresholds,
// conversion fractions, and the ES constraint.
PlanEvaluation evaluate_plan(const SystemState& system, const TargetPlan& plan,
                             const OptimizerInputs& inputs, const ESParams& es_params,
                             const PMOParams& pmo_params);

// Maximize the unconverted fraction subject to ES < es_cap. Ties break on
// lower ES, then on the lexicographically smallest per-pool
// (collateral index, dU index) tuple in pool order. When nothing is feasible
// the minimum-ES plan is returned flagged infeasible.
TargetPlan optimize_targets(const SystemState& system, const OptimizerInputs& inputs,
                            const ESParams& es_params, const PMOParams& pmo_params,
                            const SearchConfig& search);

} // namespace ida
