#include "ida/optimizer.hpp"

#include "ida/accounting.hpp"
#include "ida/errors.hpp"
#include "ida/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ida {

void SearchConfig::validate() const {
    if (c_points < 1 || du_points < 1)
        raise(ErrCode::config_error, "search grid needs at least one point per axis");
    if (!(c_lo_mult > 0.0 && c_hi_mult >= c_lo_mult))
        raise(ErrCode::config_error, "collateral multipliers must satisfy 0 < lo <= hi");
    if (!(du_hi >= du_lo)) raise(ErrCode::config_error, "du bounds must satisfy lo <= hi");
    if (max_sweeps < 1) raise(ErrCode::config_error, "max_sweeps must be >= 1");
}

OptimizerGrid make_grid(const SystemState& system, const SearchConfig& search) {
    OptimizerGrid grid;
    grid.c_values.resize(system.pools.size());
    for (size_t i = 0; i < system.pools.size(); ++i) {
        const double base = system.pools[i].collateral_long;
        auto& vals = grid.c_values[i];
        vals.reserve(search.c_points);
        for (int k = 0; k < search.c_points; ++k) {
            const double t = search.c_points == 1
                                 ? 0.0
                                 : static_cast<double>(k) / (search.c_points - 1);
            vals.push_back(base * (search.c_lo_mult + t * (search.c_hi_mult - search.c_lo_mult)));
        }
    }
    grid.du_values.reserve(search.du_points);
    for (int k = 0; k < search.du_points; ++k) {
        const double t =
            search.du_points == 1 ? 0.0 : static_cast<double>(k) / (search.du_points - 1);
        grid.du_values.push_back(search.du_lo + t * (search.du_hi - search.du_lo));
    }
    return grid;
}

bool du_admissible(double base_target, double du, double m_threshold) {
    const PerPoolTarget t = per_pool_target(base_target, du);
    return !t.clamped && t.value < m_threshold;
}

namespace {

// Lower-triangular Cholesky with a small progressive jitter for PSD
// matrices that are numerically singular.
std::vector<double> cholesky(const CorrelationMatrix& corr) {
    const size_t n = corr.size();
    std::vector<double> a(corr.entries);
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<double> l(n * n, 0.0);
        bool ok = true;
        for (size_t i = 0; i < n && ok; ++i) {
            for (size_t j = 0; j <= i; ++j) {
                double s = a[i * n + j];
                for (size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    l[i * n + i] = std::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        if (ok) return l;
        const double jitter = std::pow(10.0, attempt - 10);
        a = corr.entries;
        for (size_t i = 0; i < n; ++i) a[i * n + i] += jitter;
    }
    raise(ErrCode::config_error, "correlation matrix is not positive semidefinite");
}

} // namespace

std::vector<double> simulate_losses(const SystemState& system, const TargetPlan& plan,
                                    const PriceModel& price_model, const CorrelationMatrix& corr,
                                    uint64_t seed, const ESParams& es_params) {
    const size_t n = system.pools.size();
    if (plan.collateral_targets.size() != n || plan.per_pool_targets.size() != n)
        raise(ErrCode::dimension_mismatch, "plan does not match pool count");
    if (price_model.assets.size() != n || corr.size() != n)
        raise(ErrCode::dimension_mismatch, "price model or matrix does not match pool count");

    // Asset base implied by the plan: collateral plus steady-state open
    // inventory at the per-pool target.
    std::vector<double> units(n), p0(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& pool = system.pools[i];
        const double oi = plan.per_pool_targets[i] * plan.collateral_targets[i] / pool.coll_rate;
        units[i] = plan.collateral_targets[i] + oi;
        p0[i] = pool.density.price;
    }
    double v0 = 0.0;
    for (size_t i = 0; i < n; ++i) v0 += units[i] * p0[i];

    const std::vector<double> chol = cholesky(corr);
    Rng rng(substream_seed(seed, 0x10d4));
    std::vector<double> losses;
    losses.reserve(es_params.sample_count);
    std::vector<double> z(n), zc(n), logp(n);

    for (int s = 0; s < es_params.sample_count; ++s) {
        for (size_t i = 0; i < n; ++i) logp[i] = std::log(p0[i]);
        for (int t = 0; t < es_params.horizon; ++t) {
            for (size_t i = 0; i < n; ++i) z[i] = rng.normal();
            for (size_t i = 0; i < n; ++i) {
                double c = 0.0;
                for (size_t k = 0; k <= i; ++k) c += chol[i * n + k] * z[k];
                zc[i] = c;
            }
            for (size_t i = 0; i < n; ++i) {
                const auto& m = price_model.assets[i];
                logp[i] += (m.drift - 0.5 * m.volatility * m.volatility) * price_model.dt +
                           m.volatility * std::sqrt(price_model.dt) * zc[i];
            }
        }
        double vt = 0.0;
        for (size_t i = 0; i < n; ++i) vt += units[i] * std::exp(logp[i]);
        losses.push_back(v0 - vt);
    }
    return losses;
}

PlanEvaluation evaluate_plan(const SystemState& system, const TargetPlan& plan,
                             const OptimizerInputs& inputs, const ESParams& es_params,
                             const PMOParams& pmo_params) {
    PlanEvaluation ev;
    double h_total = 0.0;
    for (size_t i = 0; i < system.pools.size(); ++i) {
        const auto& pool = system.pools[i];
        const double oi = open_inventory(pool);
        const double util = oi / (plan.collateral_targets[i] / pool.coll_rate);
        const double o_i = plan.per_pool_targets[i];
        const double n_i =
            threshold_n(pmo_params.m_threshold, o_i, inputs.d_no, inputs.d_mn, inputs.lever).value;
        const int rounds = i < inputs.rounds.size() ? std::max(inputs.rounds[i], 1) : 1;
        double h = 0.0;
        if (util >= pmo_params.m_threshold) {
            h = system.circulating_supply > 0.0
                    ? conversion_fraction_saturated(pool.accounting_state,
                                                    system.circulating_supply)
                    : 0.0;
        } else if (util >= n_i) {
            h = pmo_params.variant == PMOParams::Variant::polynomial
                    ? conversion_fraction_poly(util, rounds, pmo_params)
                    : conversion_fraction_logistic(util, rounds, pmo_params);
        }
        h_total += h;
    }
    ev.objective = 1.0 - h_total;

    const auto losses =
        simulate_losses(system, plan, inputs.price_model, inputs.corr, inputs.seed, es_params);
    ev.es = expected_shortfall(losses, es_params.alpha_conf).es;
    ev.feasible = ev.es < es_params.es_cap;
    return ev;
}

namespace {

TargetPlan build_plan(const SystemState& system, const OptimizerGrid& grid,
                      const std::vector<int>& c_idx, const std::vector<int>& du_idx,
                      double base_target) {
    TargetPlan plan;
    const size_t n = system.pools.size();
    plan.collateral_targets.resize(n);
    plan.du_adjustments.resize(n);
    plan.per_pool_targets.resize(n);
    for (size_t i = 0; i < n; ++i) {
        plan.collateral_targets[i] = grid.c_values[i][c_idx[i]];
        plan.du_adjustments[i] = grid.du_values[du_idx[i]];
        plan.per_pool_targets[i] = per_pool_target(base_target, plan.du_adjustments[i]).value;
    }
    return plan;
}

struct Candidate {
    std::vector<int> c_idx, du_idx;
    PlanEvaluation ev;
    bool valid{false};
};

// Comparison realizing the tie-break: higher objective, then lower ES, then
// the lexicographically smaller (c_idx[i], du_idx[i]) tuple in pool order.
bool better_feasible(const Candidate& a, const Candidate& b) {
    if (a.ev.objective != b.ev.objective) return a.ev.objective > b.ev.objective;
    if (a.ev.es != b.ev.es) return a.ev.es < b.ev.es;
    for (size_t i = 0; i < a.c_idx.size(); ++i) {
        if (a.c_idx[i] != b.c_idx[i]) return a.c_idx[i] < b.c_idx[i];
        if (a.du_idx[i] != b.du_idx[i]) return a.du_idx[i] < b.du_idx[i];
    }
    return false;
}

bool better_min_es(const Candidate& a, const Candidate& b) {
    if (a.ev.es != b.ev.es) return a.ev.es < b.ev.es;
    for (size_t i = 0; i < a.c_idx.size(); ++i) {
        if (a.c_idx[i] != b.c_idx[i]) return a.c_idx[i] < b.c_idx[i];
        if (a.du_idx[i] != b.du_idx[i]) return a.du_idx[i] < b.du_idx[i];
    }
    return false;
}

} // namespace

TargetPlan optimize_targets(const SystemState& system, const OptimizerInputs& inputs,
                            const ESParams& es_params, const PMOParams& pmo_params,
                            const SearchConfig& search) {
    search.validate();
    const size_t n = system.pools.size();
    const OptimizerGrid grid = make_grid(system, search);

    std::vector<int> du_options;
    for (int k = 0; k < search.du_points; ++k)
        if (du_admissible(inputs.base_target, grid.du_values[k], pmo_params.m_threshold))
            du_options.push_back(k);
    if (du_options.empty())
        raise(ErrCode::config_error, "no admissible dU candidate on the search grid");

    auto evaluate = [&](const std::vector<int>& c_idx,
                        const std::vector<int>& du_idx) -> Candidate {
        Candidate cand{c_idx, du_idx, {}, true};
        const TargetPlan plan = build_plan(system, grid, c_idx, du_idx, inputs.base_target);
        cand.ev = evaluate_plan(system, plan, inputs, es_params, pmo_params);
        return cand;
    };

    double total_points = 1.0;
    for (size_t i = 0; i < n; ++i)
        total_points *= static_cast<double>(search.c_points) *
                        static_cast<double>(du_options.size());
    const bool exhaustive =
        search.mode == SearchConfig::Mode::exhaustive ||
        (search.mode == SearchConfig::Mode::automatic &&
         total_points <= static_cast<double>(search.exhaustive_limit));

    Candidate best_feas, best_any;
    auto consider = [&](const Candidate& cand) {
        if (!best_any.valid || better_min_es(cand, best_any)) best_any = cand;
        if (cand.ev.feasible && (!best_feas.valid || better_feasible(cand, best_feas)))
            best_feas = cand;
    };

    if (exhaustive) {
        // Odometer over per-pool (c index, du index) pairs in pool order.
        std::vector<int> c_idx(n, 0), du_pos(n, 0);
        while (true) {
            std::vector<int> du_idx(n);
            for (size_t i = 0; i < n; ++i) du_idx[i] = du_options[du_pos[i]];
            consider(evaluate(c_idx, du_idx));

            size_t axis = 2 * n;
            while (axis > 0) {
                const size_t slot = axis - 1;
                const size_t pool = slot / 2;
                if (slot % 2 == 1) {
                    if (++du_pos[pool] < static_cast<int>(du_options.size())) break;
                    du_pos[pool] = 0;
                } else {
                    if (++c_idx[pool] < search.c_points) break;
                    c_idx[pool] = 0;
                }
                --axis;
            }
            if (axis == 0) break;
        }
    } else {
        // Block coordinate descent seeded at the zero-adjustment plan
        // (collateral snapped to the nearest grid point, dU nearest zero).
        std::vector<int> c_idx(n), du_pos(n);
        for (size_t i = 0; i < n; ++i) {
            int best_k = 0;
            double best_d = std::abs(grid.c_values[i][0] - system.pools[i].collateral_long);
            for (int k = 1; k < search.c_points; ++k) {
                const double d = std::abs(grid.c_values[i][k] - system.pools[i].collateral_long);
                if (d < best_d) {
                    best_d = d;
                    best_k = k;
                }
            }
            c_idx[i] = best_k;
            int best_j = 0;
            for (size_t j = 1; j < du_options.size(); ++j)
                if (std::abs(grid.du_values[du_options[j]]) <
                    std::abs(grid.du_values[du_options[best_j]]))
                    best_j = static_cast<int>(j);
            du_pos[i] = best_j;
        }

        auto du_of = [&](const std::vector<int>& pos) {
            std::vector<int> idx(n);
            for (size_t i = 0; i < n; ++i) idx[i] = du_options[pos[i]];
            return idx;
        };
        auto prefer = [&](const Candidate& cand, const Candidate& incumbent) {
            if (cand.ev.feasible != incumbent.ev.feasible) return cand.ev.feasible;
            return cand.ev.feasible ? better_feasible(cand, incumbent)
                                    : better_min_es(cand, incumbent);
        };

        Candidate current = evaluate(c_idx, du_of(du_pos));
        consider(current);
        for (int sweep = 0; sweep < search.max_sweeps; ++sweep) {
            bool moved = false;
            for (size_t i = 0; i < n; ++i) {
                int best_k = c_idx[i];
                Candidate local = current;
                for (int k = 0; k < search.c_points; ++k) {
                    if (k == c_idx[i]) continue;
                    std::vector<int> trial = c_idx;
                    trial[i] = k;
                    Candidate cand = evaluate(trial, du_of(du_pos));
                    consider(cand);
                    if (prefer(cand, local)) {
                        local = cand;
                        best_k = k;
                    }
                }
                if (best_k != c_idx[i]) {
                    c_idx[i] = best_k;
                    current = local;
                    moved = true;
                }

                int best_j = du_pos[i];
                local = current;
                for (size_t j = 0; j < du_options.size(); ++j) {
                    if (static_cast<int>(j) == du_pos[i]) continue;
                    std::vector<int> trial = du_pos;
                    trial[i] = static_cast<int>(j);
                    Candidate cand = evaluate(c_idx, du_of(trial));
                    consider(cand);
                    if (prefer(cand, local)) {
                        local = cand;
                        best_j = static_cast<int>(j);
                    }
                }
                if (best_j != du_pos[i]) {
                    du_pos[i] = best_j;
                    current = local;
                    moved = true;
                }
            }
            if (!moved) break;
        }
    }

    const Candidate& pick = best_feas.valid ? best_feas : best_any;
    TargetPlan plan = build_plan(system, grid, pick.c_idx, pick.du_idx, inputs.base_target);
    plan.feasible = best_feas.valid;
    plan.objective = pick.ev.objective;
    plan.es = pick.ev.es;
    return plan;
}

} // namespace ida
