// Seeded price dynamics: per-asset geometric Brownian motion with optional
// compound-Poisson jumps. Each asset draws from its own substream so paths
// are independent of pool count and ordering.
#pragma once

#include <cstdint>
#include <vector>

namespace ida {

struct AssetPriceModel {
    double drift{0.0};          // per-epoch log drift
    double volatility{0.0};     // per-epoch log volatility
    double jump_intensity{0.0}; // expected jumps per epoch
    double jump_mean{0.0};      // mean log jump size
    double jump_sigma{0.0};     // log jump size dispersion
};

struct PriceModel {
    std::vector<AssetPriceModel> assets;
    double dt{1.0};
};

// Returns per-asset series of horizon + 1 prices, [asset][t], with
// series[asset][0] == initial[asset]. Deterministic per seed.
std::vector<std::vector<double>> generate_price_path(const PriceModel& model,
                                                     const std::vector<double>& initial,
                                                     int horizon, uint64_t seed);

} // namespace ida
