#include "ida/price_path.hpp"

#include "ida/errors.hpp"
#include "ida/rng.hpp"

#include <cmath>

namespace ida {

std::vector<std::vector<double>> generate_price_path(const PriceModel& model,
                                                     const std::vector<double>& initial,
                                                     int horizon, uint64_t seed) {
    if (model.assets.size() != initial.size())
        raise(ErrCode::dimension_mismatch, "price model and initial prices differ in size");
    if (horizon < 0) raise(ErrCode::config_error, "horizon must be >= 0");

    std::vector<std::vector<double>> out(model.assets.size());
    for (size_t a = 0; a < model.assets.size(); ++a) {
        const auto& m = model.assets[a];
        Rng rng(substream_seed(seed, a));
        auto& series = out[a];
        series.reserve(static_cast<size_t>(horizon) + 1);
        series.push_back(initial[a]);
        const double dt = model.dt;
        for (int t = 0; t < horizon; ++t) {
            double log_step = (m.drift - 0.5 * m.volatility * m.volatility) * dt +
                              m.volatility * std::sqrt(dt) * rng.normal();
            if (m.jump_intensity > 0.0) {
                const int jumps = rng.poisson(m.jump_intensity * dt);
                for (int j = 0; j < jumps; ++j)
                    log_step += m.jump_mean + m.jump_sigma * rng.normal();
            }
            series.push_back(series.back() * std::exp(log_step));
        }
    }
    return out;
}

} // namespace ida
