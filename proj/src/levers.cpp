#include "ida/levers.hpp"

#include "ida/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ida {

void LeverParams::validate() const {
    if (!(0.0 <= delta_no_min && delta_no_min <= delta_no_max))
        raise(ErrCode::config_error, "delta_no bounds must satisfy 0 <= min <= max");
    if (!(0.0 <= delta_mn_min && delta_mn_min <= delta_mn_max))
        raise(ErrCode::config_error, "delta_mn bounds must satisfy 0 <= min <= max");
    if (!(beta_blend >= 0.0 && beta_blend <= 1.0))
        raise(ErrCode::config_error, "beta_blend must be in [0, 1]");
    if (variance_window < 2) raise(ErrCode::config_error, "variance_window must be >= 2");
}

double absolute_velocity(double volume, double supply) {
    if (!(supply > 0.0)) raise(ErrCode::zero_supply, "velocity needs positive supply");
    return volume / supply;
}

double relative_velocity(double v, double mean_v) {
    if (!(mean_v > 0.0)) raise(ErrCode::zero_mean, "relative velocity needs positive mean");
    return v / mean_v;
}

double supply_variance(std::span<const double> history) {
    if (history.size() < 2)
        raise(ErrCode::insufficient_history, "supply variance needs a window of >= 2");
    double mean = 0.0;
    for (double v : history) mean += v;
    mean /= static_cast<double>(history.size());
    if (mean == 0.0) return 0.0;
    double var = 0.0;
    for (double v : history) var += (v - mean) * (v - mean);
    var /= static_cast<double>(history.size());
    return var / (mean * mean);
}

double delta_no(double psi, const LeverParams& p) {
    const double v = (p.delta_no_max - p.delta_no_min) * p.l_gain * std::pow(psi, p.k_exp) +
                     p.delta_no_min;
    return std::min(v, p.delta_no_max);
}

double delta_mn(double treasury_norm, const LeverParams& p) {
    const double v = p.delta_mn_max -
                     (p.delta_mn_max - p.delta_mn_min) * p.j_gain * std::pow(treasury_norm, p.d_exp);
    return std::max(v, p.delta_mn_min);
}

ThresholdResult threshold_n(double m, double o, double d_no, double d_mn,
                            const LeverParams& params) {
    ThresholdResult r;
    const double variance_term =
        params.mode == LeverParams::Mode::verbatim ? (m - o - d_no) : (o + d_no);
    r.raw = params.beta_blend * variance_term + (1.0 - params.beta_blend) * (m - d_mn);
    const double eps = 1e-6 * (m - o);
    r.value = std::clamp(r.raw, o + eps, m - eps);
    r.clamped = r.value != r.raw;
    return r;
}

} // namespace ida
