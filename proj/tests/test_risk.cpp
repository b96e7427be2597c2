#include "ida/risk.hpp"

#include "ida/errors.hpp"
#include "ida/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ida;
using namespace ida::test;

namespace {

// Random PSD correlation matrix via a Gram matrix of random vectors.
CorrelationMatrix random_correlation(Rng& rng, size_t n) {
    std::vector<std::vector<double>> v(n, std::vector<double>(n + 2));
    for (auto& row : v)
        for (auto& x : row) x = rng.normal();
    CorrelationMatrix m = CorrelationMatrix::identity([&] {
        std::vector<std::string> syms;
        for (size_t i = 0; i < n; ++i) syms.push_back("A" + std::to_string(i));
        return syms;
    }());
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double dot = 0, ni = 0, nj = 0;
            for (size_t k = 0; k < v[i].size(); ++k) {
                dot += v[i][k] * v[j][k];
                ni += v[i][k] * v[i][k];
                nj += v[j][k] * v[j][k];
            }
            m.at(i, j) = dot / std::sqrt(ni * nj);
        }
    }
    return m;
}

} // namespace

TEST_SUITE("risk") {

TEST_CASE("asset weights") {
    auto single = make_system({make_pool(0, "X", 150, 100, 100, 0.5, 1.0)});
    const auto w1 = asset_weights(single);
    CHECK(w1.size() == 1);
    CHECK(w1[0] == doctest::Approx(1.0));

    // A^i of 30 and 70.
    auto two = make_system({
        make_pool(0, "X", 110, 100, 20, 0.5, 1.0),
        make_pool(1, "Y", 130, 100, 40, 0.5, 1.0),
    });
    const auto w2 = asset_weights(two);
    CHECK(w2[0] == doctest::Approx(0.3));
    CHECK(w2[1] == doctest::Approx(0.7));

    // Uniform price rescaling leaves weights unchanged.
    auto scaled = two;
    for (auto& p : scaled.pools) {
        p.density.price *= 7.0;
        p.local_price *= 7.0;
    }
    const auto w3 = asset_weights(scaled);
    CHECK(w3[0] == doctest::Approx(w2[0]));
    CHECK(w3[1] == doctest::Approx(w2[1]));
}

TEST_CASE("asset weights sum to one") {
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        std::vector<PoolState> pools;
        const size_t n = 2 + rng.index(5);
        for (size_t k = 0; k < n; ++k)
            pools.push_back(make_pool(static_cast<uint32_t>(k), "P" + std::to_string(k),
                                      100 + rng.uniform(-20, 60), 100, rng.uniform(1, 100),
                                      rng.uniform(0.1, 1), rng.uniform(0.5, 2)));
        const auto sys = make_system(pools);
        const auto w = asset_weights(sys);
        double sum = 0;
        for (double x : w) sum += x;
        CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
}

TEST_CASE("weighted correlation") {
    CorrelationMatrix m = CorrelationMatrix::identity({"X", "Y"});
    m.at(0, 1) = m.at(1, 0) = 0.37;
    const std::vector<double> coll2{10.0, 25.0};
    CHECK(weighted_correlation(0, m, coll2) == doctest::Approx(0.37));

    CorrelationMatrix m3 = CorrelationMatrix::identity({"X", "Y", "Z"});
    m3.at(0, 1) = m3.at(1, 0) = 0.2;
    m3.at(0, 2) = m3.at(2, 0) = 0.6;
    const std::vector<double> coll3{5.0, 30.0, 30.0};
    CHECK(weighted_correlation(0, m3, coll3) == doctest::Approx(0.4));

    m3.at(0, 1) = m3.at(1, 0) = 0.0;
    m3.at(0, 2) = m3.at(2, 0) = 0.0;
    CHECK(weighted_correlation(0, m3, coll3) == doctest::Approx(0.0));

    const std::vector<double> none{5.0, 0.0, 0.0};
    CHECK_THROWS_AS(weighted_correlation(0, m3, none), Error);
}

TEST_CASE("weighted correlation stays inside [-1, 1]") {
    Rng rng(43);
    for (int i = 0; i < 200; ++i) {
        const size_t n = 2 + rng.index(5);
        const CorrelationMatrix m = random_correlation(rng, n);
        std::vector<double> coll(n);
        for (auto& c : coll) c = rng.uniform(0.1, 100);
        for (size_t a = 0; a < n; ++a) {
            const double rho = weighted_correlation(a, m, coll);
            CHECK(rho >= -1.0 - 1e-12);
            CHECK(rho <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("utilization adjustment: tan response") {
    CorrAdjustParams p;
    CHECK(utilization_adjustment(0.0, 0.5, p) == 0.0);
    CHECK(utilization_adjustment(0.5, 0.0, p) == doctest::Approx(0.1 * std::tan(0.5)));
    CHECK(utilization_adjustment(-0.5, 0.0, p) == doctest::Approx(-0.1 * std::tan(0.5)));
}

TEST_CASE("utilization adjustment is odd and monotone in |rho|") {
    CorrAdjustParams p;
    p.corr_gamma = 1.7;
    p.corr_phi = 1.3;
    Rng rng(47);
    for (int i = 0; i < 300; ++i) {
        const double rho = rng.uniform(0.001, 1.0);
        const double w = rng.uniform(0, 1);
        const double up = utilization_adjustment(rho, w, p);
        CHECK(utilization_adjustment(-rho, w, p) == doctest::Approx(-up));
        const double more = utilization_adjustment(std::min(rho * 1.2, 1.0), w, p);
        CHECK(more >= up - 1e-15);
    }
    // Guard keeps the response finite at |rho| = 1 even with beta near pi/2.
    p.corr_beta = M_PI / 2.0;
    CHECK(std::isfinite(utilization_adjustment(1.0, 0.5, p)));
}

TEST_CASE("per-pool target") {
    CHECK(per_pool_target(0.5, 0.0).value == 0.5);
    CHECK(per_pool_target(0.5, 0.05).value == doctest::Approx(0.45));
    CHECK(per_pool_target(0.5, -0.05).value == doctest::Approx(0.55));
    const PerPoolTarget clamped = per_pool_target(0.5, 0.7);
    CHECK(clamped.clamped);
    CHECK(clamped.value > 0.0);
}

TEST_CASE("expected shortfall at the spec points") {
    std::vector<double> losses{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const ESEstimate e = expected_shortfall(losses, 0.8);
    CHECK(e.es == doctest::Approx(9.5));
    CHECK(e.var == doctest::Approx(9.0));

    std::vector<double> flat(50, 3.25);
    CHECK(expected_shortfall(flat, 0.9).es == doctest::Approx(3.25));
}

TEST_CASE("expected shortfall matches a brute-force oracle and dominates VaR") {
    Rng rng(53);
    for (int i = 0; i < 300; ++i) {
        const size_t n = 2 + rng.index(1000);
        std::vector<double> losses(n);
        for (auto& x : losses) x = rng.normal() * rng.uniform(0.1, 10);
        const double alpha = rng.uniform(0.5, 0.99);

        std::vector<double> sorted = losses;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        size_t m = static_cast<size_t>(std::ceil((1.0 - alpha) * n));
        m = std::clamp<size_t>(m, 1, n);
        double sum = 0;
        for (size_t k = 0; k < m; ++k) sum += sorted[k];

        const ESEstimate e = expected_shortfall(losses, alpha);
        CHECK(e.es == sum / m); // bitwise: same sort, same summation order
        CHECK(e.es >= e.var);
    }
}

TEST_CASE("portfolio variance") {
    CorrelationMatrix id2 = CorrelationMatrix::identity({"X", "Y"});
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> degenerate{1.0, 0.0};
    const std::vector<double> vols{0.2, 0.4};
    CHECK(portfolio_variance(degenerate, vols, id2) == doctest::Approx(0.04));
    CHECK(portfolio_variance(w, vols, id2) == doctest::Approx(0.05));

    CorrelationMatrix ones = id2;
    ones.at(0, 1) = ones.at(1, 0) = 1.0;
    const std::vector<double> same{0.3, 0.3};
    CHECK(portfolio_variance(w, same, ones) == doctest::Approx(0.09));

    const std::vector<double> w3{0.2, 0.3, 0.5};
    CHECK_THROWS_AS(portfolio_variance(w3, vols, id2), Error);
}

TEST_CASE("portfolio variance is nonnegative for PSD matrices") {
    Rng rng(59);
    for (int i = 0; i < 300; ++i) {
        const size_t n = 2 + rng.index(4);
        const CorrelationMatrix m = random_correlation(rng, n);
        std::vector<double> w(n), vols(n);
        double sum = 0;
        for (auto& x : w) {
            x = rng.uniform(0, 1);
            sum += x;
        }
        for (auto& x : w) x /= sum;
        for (auto& v : vols) v = rng.uniform(0, 0.8);
        CHECK(portfolio_variance(w, vols, m) >= -1e-12);
    }
    // Two-asset closed form.
    CorrelationMatrix m2 = CorrelationMatrix::identity({"X", "Y"});
    m2.at(0, 1) = m2.at(1, 0) = 0.43;
    const std::vector<double> w{0.6, 0.4}, vols{0.2, 0.35};
    const double direct = 0.36 * 0.04 + 0.16 * 0.1225 + 2 * 0.6 * 0.4 * 0.43 * 0.2 * 0.35;
    CHECK(portfolio_variance(w, vols, m2) == doctest::Approx(direct));
}

TEST_CASE("correlation matrix validation") {
    CorrelationMatrix ok = CorrelationMatrix::identity({"X", "Y"});
    ok.at(0, 1) = ok.at(1, 0) = 0.5;
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.min_eigenvalue() == doctest::Approx(0.5));

    CorrelationMatrix bad = ok;
    bad.at(0, 1) = 0.4; // asymmetric
    CHECK_THROWS_AS(bad.validate(), Error);

    // Not PSD: three assets pairwise at -0.9.
    CorrelationMatrix neg = CorrelationMatrix::identity({"A", "B", "C"});
    for (size_t i = 0; i < 3; ++i)
        for (size_t j = 0; j < 3; ++j)
            if (i != j) neg.at(i, j) = -0.9;
    CHECK(neg.min_eigenvalue() < 0.0);
    CHECK_THROWS_AS(neg.validate(), Error);
}

TEST_CASE("regime scaling") {
    ESParams p;
    p.scale_es_lo = 0.02;
    p.scale_es_hi = 0.10;
    p.scale_max = 3.0;
    CHECK(regime_scaling(0.0, p) == 1.0);
    CHECK(regime_scaling(0.06, p) == doctest::Approx(2.0)); // midpoint of the knees
    CHECK(regime_scaling(0.5, p) == 3.0);
}

} // TEST_SUITE
