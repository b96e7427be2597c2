#include "ida/levers.hpp"

#include "ida/errors.hpp"
#include "ida/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <vector>

using namespace ida;
using namespace ida::test;

namespace {

LeverParams lever() {
    LeverParams p;
    p.delta_no_min = 0.05;
    p.delta_no_max = 0.2;
    p.delta_mn_min = 0.05;
    p.delta_mn_max = 0.2;
    p.l_gain = 1.0;
    p.k_exp = 1.0;
    p.j_gain = 1.0;
    p.d_exp = 1.0;
    return p;
}

} // namespace

TEST_SUITE("levers") {

TEST_CASE("absolute velocity") {
    CHECK(absolute_velocity(0, 1000) == 0.0);
    CHECK(absolute_velocity(500, 1000) == doctest::Approx(0.5));
    CHECK(absolute_velocity(1000, 1000) == doctest::Approx(1.0));
    CHECK_THROWS_AS(absolute_velocity(1, 0), Error);
}

TEST_CASE("relative velocity") {
    CHECK(relative_velocity(0.25, 0.25) == doctest::Approx(1.0));
    CHECK(relative_velocity(0.5, 0.25) == doctest::Approx(2.0));
    CHECK_THROWS_AS(relative_velocity(1, 0), Error);
}

TEST_CASE("supply variance is the scale-free window variance") {
    const std::vector<double> flat{1000, 1000, 1000, 1000};
    CHECK(supply_variance(flat) == 0.0);
    const std::vector<double> pair{900, 1100};
    CHECK(supply_variance(pair) == doctest::Approx(0.01));
    std::vector<double> scaled;
    for (double v : pair) scaled.push_back(3.5 * v);
    CHECK(supply_variance(scaled) == doctest::Approx(supply_variance(pair)));
    const std::vector<double> one{5.0};
    CHECK_THROWS_AS(supply_variance(one), Error);
}

TEST_CASE("delta_no follows the variance") {
    const LeverParams p = lever();
    CHECK(delta_no(0.0, p) == doctest::Approx(0.05));
    CHECK(delta_no(0.5, p) == doctest::Approx(0.125));
    CHECK(delta_no(1e9, p) == doctest::Approx(0.2));
}

TEST_CASE("delta_mn shrinks with the treasury") {
    const LeverParams p = lever();
    CHECK(delta_mn(0.0, p) == doctest::Approx(0.2));
    CHECK(delta_mn(0.5, p) == doctest::Approx(0.125));
    CHECK(delta_mn(1e9, p) == doctest::Approx(0.05));
}

TEST_CASE("delta outputs are monotone and stay inside their bounds") {
    const LeverParams p = lever();
    Rng rng(31);
    for (int i = 0; i < 500; ++i) {
        const double psi = rng.uniform(0, 3);
        const double tr = rng.uniform(0, 3);
        const double dn = delta_no(psi, p);
        const double dm = delta_mn(tr, p);
        CHECK(dn >= p.delta_no_min);
        CHECK(dn <= p.delta_no_max);
        CHECK(dm >= p.delta_mn_min);
        CHECK(dm <= p.delta_mn_max);
        CHECK(delta_no(psi * 1.5, p) >= dn);
        CHECK(delta_mn(tr * 1.5, p) <= dm);
    }
}

TEST_CASE("threshold blend at the spec points") {
    LeverParams p = lever();
    p.beta_blend = 0.0;
    const ThresholdResult r0 = threshold_n(0.9, 0.5, 0.125, 0.125, p);
    CHECK(r0.raw == doctest::Approx(0.775));
    CHECK_FALSE(r0.clamped);

    // Verbatim beta=1 can land below O; it is clamped and flagged.
    p.beta_blend = 1.0;
    const ThresholdResult r1 = threshold_n(0.9, 0.5, 0.125, 0.125, p);
    CHECK(r1.raw == doctest::Approx(0.275));
    CHECK(r1.clamped);
    CHECK(r1.value > 0.5);
    CHECK(r1.value < 0.9);

    p.mode = LeverParams::Mode::distance;
    const ThresholdResult r2 = threshold_n(0.9, 0.5, 0.125, 0.125, p);
    CHECK(r2.raw == doctest::Approx(0.625));
    CHECK_FALSE(r2.clamped);
}

TEST_CASE("threshold always lands strictly inside (O, M)") {
    Rng rng(37);
    for (int i = 0; i < 1000; ++i) {
        LeverParams p = lever();
        p.beta_blend = rng.uniform(0, 1);
        p.mode = rng.index(2) == 0 ? LeverParams::Mode::verbatim : LeverParams::Mode::distance;
        const double o = rng.uniform(0.05, 0.7);
        const double m = o + rng.uniform(0.01, 0.29);
        const ThresholdResult r =
            threshold_n(m, o, rng.uniform(0, 0.5), rng.uniform(0, 0.5), p);
        CHECK(r.value > o);
        CHECK(r.value < m);
    }
}

TEST_CASE("blend weights isolate their inputs") {
    LeverParams p = lever();
    // beta = 0: independent of the variance leg.
    p.beta_blend = 0.0;
    CHECK(threshold_n(0.9, 0.5, 0.05, 0.125, p).value ==
          threshold_n(0.9, 0.5, 0.19, 0.125, p).value);
    // beta = 1 in distance mode: independent of the treasury leg.
    p.beta_blend = 1.0;
    p.mode = LeverParams::Mode::distance;
    CHECK(threshold_n(0.9, 0.5, 0.125, 0.05, p).value ==
          threshold_n(0.9, 0.5, 0.125, 0.19, p).value);
}

} // TEST_SUITE
