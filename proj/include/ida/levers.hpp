// Dynamic lever modulation: velocity measures, the circulating-supply
// variance proxy, and the N_t threshold blend between the variance- and
// treasury-driven discrepancies.
#pragma once

#include <span>

namespace ida {

struct LeverParams {
    double delta_no_min{0.02};
    double delta_no_max{0.2};
    double delta_mn_min{0.02};
    double delta_mn_max{0.2};
    double l_gain{1.0}; // variance gain
    double k_exp{1.0};  // variance exponent (the paper's z-proportionality)
    double j_gain{1.0}; // treasury gain
    double d_exp{1.0};  // treasury exponent
    double beta_blend{0.5};
    int variance_window{16};

    // N_t interpretation: verbatim uses M - O - delta_no in the first blend
    // term; distance reads delta_no as N - O and uses O + delta_no.
    enum class Mode { verbatim, distance };
    Mode mode{Mode::verbatim};

    void validate() const; // throws config_error
};

struct VelocityReading {
    double absolute{0.0};
    double relative{0.0};
};

// TV / CS. Throws zero_supply.
double absolute_velocity(double volume, double supply);

// V / mean(V). Throws zero_mean.
double relative_velocity(double v, double mean_v);

// Scale-free variance proxy: population variance of the window divided by the
// squared window mean. Throws insufficient_history for windows shorter
// than 2; returns 0 for an all-zero window.
double supply_variance(std::span<const double> history);

// min((max - min) * l * psi^k + min, max)
double delta_no(double psi, const LeverParams& params);

// max(max - (max - min) * j * tr^d, min). The caller passes the treasury
// normalized by attributable assets so d stays scale-free.
double delta_mn(double treasury_norm, const LeverParams& params);

struct ThresholdResult {
    double value{0.0}; // final N_t, strictly inside (o, m)
    double raw{0.0};   // the blend before clamping
    bool clamped{false};
};

// Blend per the selected mode, then clamp strictly inside (o, m) so the
// lever ordering O <= N <= M always holds.
ThresholdResult threshold_n(double m, double o, double d_no, double d_mn,
                            const LeverParams& params);

} // namespace ida
