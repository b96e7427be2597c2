// Deterministic random number generation. All draws are hand-rolled on top of
// mt19937_64 so that output is identical across standard library
// implementations (std::*_distribution is not portable).
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ida {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derive an independent substream seed from (seed, stream id).
inline uint64_t substream_seed(uint64_t seed, uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 1));
}

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in (0, 1); never returns 0 so logs are safe.
    double uniform01() {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller; one fresh pair per call, second value discarded.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Knuth multiplication method; fine for the small intensities used here.
    int poisson(double mean) {
        if (!(mean > 0.0)) return 0;
        const double limit = std::exp(-mean);
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform01();
        } while (p > limit);
        return k - 1;
    }

    size_t index(size_t n) { return static_cast<size_t>(gen_() % n); }

private:
    std::mt19937_64 gen_;
};

} // namespace ida
