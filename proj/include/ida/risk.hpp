// Dynamic asset management measures: asset weights, collateral-weighted
// correlation, the tan-based utilization adjustment, expected shortfall,
// portfolio variance, and regime scaling.
#pragma once

#include "ida/state.hpp"

#include <span>
#include <string>
#include <vector>

namespace ida {

struct CorrelationMatrix {
    std::vector<std::string> symbols;
    std::vector<double> entries; // row-major n x n

    size_t size() const { return symbols.size(); }
    double at(size_t i, size_t j) const { return entries[i * size() + j]; }
    double& at(size_t i, size_t j) { return entries[i * size() + j]; }

    static CorrelationMatrix identity(std::vector<std::string> syms);

    // Pairwise Pearson correlations of the return series (one row per
    // observation interval, one column per asset). Columns with zero
    // variance fall back to zero off-diagonal correlation.
    static CorrelationMatrix from_returns(std::vector<std::string> syms,
                                          const std::vector<std::vector<double>>& returns);

    // Square numeric matrix with a header row of asset symbols.
    static CorrelationMatrix load_csv(const std::string& path);

    double min_eigenvalue() const; // Jacobi sweep; matrices here are small

    // Symmetry, unit diagonal, entries in [-1, 1], smallest eigenvalue
    // >= -eps. Throws config_error.
    void validate(double eps = 1e-9) const;
};

struct CorrAdjustParams {
    // alpha_{+/-}(w) = g0 + g1 * w
    double alpha_pos_g0{0.1};
    double alpha_pos_g1{0.0};
    double alpha_neg_g0{0.1};
    double alpha_neg_g1{0.0};
    double corr_beta{1.0};  // stretches the correlation impact
    double corr_gamma{1.0}; // correlation exponent (sign-preserving power)
    double corr_phi{1.0};   // output concavity exponent (sign-preserving)
    double tan_guard{0.99}; // tan argument clamped to +/- guard * pi/2

    void validate() const;
};

struct ESParams {
    double alpha_conf{0.95}; // confidence level 1 - alpha
    double es_cap{1e30};     // portfolio ES threshold, peg-units
    int sample_count{2000};
    int horizon{1}; // epochs of the loss simulation
    // Regime scaling knees (ES normalized by attributable assets) and cap.
    double scale_es_lo{0.02};
    double scale_es_hi{0.10};
    double scale_max{3.0};

    void validate() const;
};

struct TargetPlan {
    std::vector<double> collateral_targets; // per-pool asset-units
    std::vector<double> du_adjustments;     // per-pool signed fractions
    std::vector<double> per_pool_targets;   // U*^i = U* - dU^i
    bool feasible{true};
    double objective{0.0};
    double es{0.0};
};

// w_i = A^i / A with A^i = L(I - I_LP) + L(C); pools with non-positive A^i
// get weight zero. Throws zero_assets when nothing is positive.
std::vector<double> asset_weights(const SystemState& system);

// sum_{z != i} rho_{iz} C^z / sum_{z != i} C^z. Throws no_counterparts.
double weighted_correlation(size_t asset_index, const CorrelationMatrix& corr,
                            std::span<const double> collaterals);

// Sign-split tan response; zero at rho == 0. The tan argument is clamped to
// +/- tan_guard * pi/2 and both powers are sign-preserving.
double utilization_adjustment(double rho_i, double weight, const CorrAdjustParams& params);

struct PerPoolTarget {
    double value{0.0};
    bool clamped{false};
};

// base - du, clamped into (0, 1).
PerPoolTarget per_pool_target(double base_target, double du);

struct ESEstimate {
    double es{0.0};  // mean of the worst ceil((1 - alpha) n) losses
    double var{0.0}; // the cut point
};

// Historical estimator, loss-positive convention. Throws empty_sample for
// samples smaller than 2.
ESEstimate expected_shortfall(std::span<const double> losses, double alpha_conf);

// sum_ij w_i w_j sigma_i sigma_j rho_ij. Throws dimension_mismatch.
double portfolio_variance(std::span<const double> weights, std::span<const double> vols,
                          const CorrelationMatrix& corr);

// Piecewise-linear map from normalized ES to a multiplicative factor in
// [1, scale_max]: 1 below scale_es_lo, scale_max above scale_es_hi.
double regime_scaling(double current_es_norm, const ESParams& params);

} // namespace ida
