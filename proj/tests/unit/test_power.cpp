#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/power.hpp"

using namespace pumpsim;
using Catch::Approx;

namespace {
const ElectricalSpec kSpec;
}

TEST_CASE("hydraulic power") {
    const auto zero = hydraulic_power(0.0, 5.0, kSpec);
    CHECK(zero.output_w == Approx(0.0));
    CHECK(zero.input_w == Approx(0.0));

    const auto op = hydraulic_power(92.93, 7.18, kSpec);
    CHECK(op.output_w == Approx(1818.0).margin(2.0));
    CHECK(op.input_w == Approx(op.output_w / 0.9).epsilon(1e-12));
    CHECK(op.output_w <= op.input_w);
}

TEST_CASE("three-phase electrical power") {
    CHECK(electrical_input_power(1.0, kSpec) == Approx(std::sqrt(3.0) * 400.0 * 30.0 * 0.9));
    CHECK(electrical_input_power(1.0, kSpec) == Approx(18706.15).margin(0.5));
    CHECK(electrical_input_power(0.0, kSpec) == Approx(0.0));
    // inrush cap clamps the current at 5x nominal
    CHECK(electrical_input_power(10.0, kSpec) ==
          Approx(std::sqrt(3.0) * 400.0 * 150.0 * 0.9));
    // non-decreasing in n until the cap, constant after
    double prev = -1.0;
    for (double n = 0.0; n < 6.0; n += 0.05) {
        const double p = electrical_input_power(n, kSpec);
        REQUIRE(p >= prev);
        prev = p;
    }
    CHECK(electrical_input_power(5.0, kSpec) == Approx(electrical_input_power(6.0, kSpec)));
}

TEST_CASE("relative noise model") {
    Rng rng(31);
    CHECK(apply_relative_noise(123.4, 0.0, rng) == 123.4);
    CHECK(rng.draw_count() == 0); // noiseless mode consumes nothing

    const int n = 100000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = apply_relative_noise(100.0, 0.01, rng);
        REQUIRE(v >= 0.0);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum2 / n - mean * mean);
    CHECK(mean == Approx(100.0).margin(0.1));
    CHECK(sd == Approx(1.0).epsilon(0.05));
}

TEST_CASE("electrical spec validation") {
    ElectricalSpec bad = kSpec;
    bad.cos_phi = 1.5;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    bad = kSpec;
    bad.eta = 0.0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
    CHECK_NOTHROW(validate(kSpec));
}
