#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/hydraulics.hpp"
#include "pumpsim/rng.hpp"
#include "support/oracles.hpp"

using namespace pumpsim;
using Catch::Approx;

namespace {
const PumpCurve kPump{15.0, -5e-4, -9e-4, 50.0};
const SystemCurve kSystem{2.0, 6e-4};
}  // namespace

TEST_CASE("pump head evaluation") {
    CHECK(pump_head(kPump, 0.0, 1.0) == Approx(15.0));
    CHECK(pump_head(kPump, 0.0, 0.5) == Approx(3.75));
    CHECK(pump_head(kPump, 100.0, 1.0) == Approx(5.95));
    // shut-off scales exactly with n^2
    for (double n : {0.1, 0.33, 0.77, 1.2})
        CHECK(pump_head(kPump, 0.0, n) == Approx(15.0 * n * n).epsilon(1e-14));
}

TEST_CASE("system head evaluation") {
    CHECK(system_head(SystemCurve{2.0, 6e-4}, 0.0) == Approx(2.0));
    CHECK(system_head(SystemCurve{2.0, 6e-4}, 100.0) == Approx(8.0));
    CHECK(system_head(SystemCurve{2.0, 3e-4}, 100.0) == Approx(5.0));
}

TEST_CASE("operating point against the closed-form root") {
    const auto op = solve_operating_point(kPump, kSystem, 1.0);
    REQUIRE(op.has_value());
    CHECK(op->q == Approx(92.93).margin(0.01));
    CHECK(op->h == Approx(7.18).margin(0.01));
    CHECK(op->h == Approx(system_head(kSystem, op->q)).margin(1e-12));

    const auto ref = oracle::operating_point(kPump, kSystem, 1.0);
    REQUIRE(ref.has_value());
    CHECK(op->q == Approx(ref->q).epsilon(1e-9));
}

TEST_CASE("stall when shut-off head cannot clear the static head") {
    // static head just below shut-off: still intersects, flow near zero
    const auto tiny = solve_operating_point(kPump, SystemCurve{14.9999, 6e-4}, 1.0);
    REQUIRE(tiny.has_value());
    CHECK(tiny->q < 1.0);  // flow collapses toward zero
    CHECK_FALSE(solve_operating_point(kPump, SystemCurve{15.0, 6e-4}, 1.0).has_value());
    CHECK_FALSE(solve_operating_point(kPump, SystemCurve{16.0, 6e-4}, 1.0).has_value());
    // reduced speed drops the shut-off head below the static head
    CHECK_FALSE(solve_operating_point(kPump, SystemCurve{8.0, 6e-4}, 0.5).has_value());
}

TEST_CASE("bisection matches the quadratic-formula oracle on random curves") {
    Rng rng(2024);
    int checked = 0;
    while (checked < 1000) {
        PumpCurve p{5.0 + 45.0 * rng.uniform(), -1e-3 * rng.uniform(),
                    -(5e-5 + 2e-3 * rng.uniform()), 50.0};
        SystemCurve s{3.0 * rng.uniform(), 1e-5 + 1e-3 * rng.uniform()};
        const double n = 0.3 + 0.9 * rng.uniform();
        const auto ref = oracle::operating_point(p, s, n);
        if (!ref) continue;
        const auto op = solve_operating_point(p, s, n);
        REQUIRE(op.has_value());
        REQUIRE(op->q == Approx(ref->q).epsilon(1e-9));
        ++checked;
    }
}

TEST_CASE("affinity consistency: the scaled problem matches the direct solve") {
    const auto direct = solve_operating_point(kPump, kSystem, 0.5);
    const auto ref = oracle::operating_point(kPump, kSystem, 0.5);
    REQUIRE(direct.has_value());
    REQUIRE(ref.has_value());
    CHECK(direct->q == Approx(ref->q).epsilon(1e-9));
}

TEST_CASE("affinity normalization") {
    const auto a = affinity_normalize(50.0, 4.0, 25.0, 50.0);
    REQUIRE(a.has_value());
    CHECK(a->q_star == Approx(100.0));
    CHECK(a->h_star == Approx(16.0));

    const auto b = affinity_normalize(80.0, 6.0, 50.0, 50.0);
    REQUIRE(b.has_value());
    CHECK(b->q_star == Approx(80.0));
    CHECK(b->h_star == Approx(6.0));

    const auto c = affinity_normalize(90.0, 5.0, 40.0, 50.0);
    REQUIRE(c.has_value());
    CHECK(c->q_star == Approx(112.5));
    CHECK(c->h_star == Approx(7.8125));

    CHECK_FALSE(affinity_normalize(10.0, 1.0, 9.0, 50.0).has_value());  // below the floor
}

TEST_CASE("affinity round trip") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double q = 200.0 * rng.uniform();
        const double h = 20.0 * rng.uniform();
        const double f = 15.0 + 40.0 * rng.uniform();
        const auto np = affinity_normalize(q, h, f, 50.0);
        REQUIRE(np.has_value());
        const double r = f / 50.0;
        CHECK(np->q_star * r == Approx(q).epsilon(1e-12));
        CHECK(np->h_star * r * r == Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("curve slopes") {
    const auto s0 = curve_slopes(kPump, kSystem, 0.0);
    CHECK(s0.m_p == Approx(-5e-4));
    CHECK(s0.m_s == Approx(0.0));
    const auto s1 = curve_slopes(kPump, kSystem, 100.0);
    CHECK(s1.m_p == Approx(-0.1805));
    CHECK(s1.m_s == Approx(0.12));
}

TEST_CASE("system slope exceeds pump slope at any valid intersection") {
    Rng rng(77);
    for (int i = 0; i < 500; ++i) {
        PumpCurve p{5.0 + 45.0 * rng.uniform(), -1e-3 * rng.uniform(),
                    -(5e-5 + 2e-3 * rng.uniform()), 50.0};
        SystemCurve s{3.0 * rng.uniform(), 1e-5 + 1e-3 * rng.uniform()};
        const auto op = solve_operating_point(p, s, 1.0);
        if (!op) continue;
        const auto sl = curve_slopes(p, s, op->q);
        REQUIRE(sl.m_s - sl.m_p > 0.0);
    }
}

TEST_CASE("monotonicity of the intersection") {
    // clogging (larger k) moves the point left
    double prev_q = 1e9;
    for (double k = 3e-4; k < 2e-3; k += 1e-4) {
        const auto op = solve_operating_point(kPump, SystemCurve{2.0, k}, 1.0);
        REQUIRE(op.has_value());
        REQUIRE(op->q < prev_q);
        prev_q = op->q;
    }
    // slowing down moves both flow and head down along the system curve
    double prev_h = 1e9;
    prev_q = 1e9;
    for (double n = 1.0; n > 0.45; n -= 0.05) {
        const auto op = solve_operating_point(kPump, kSystem, n);
        REQUIRE(op.has_value());
        REQUIRE(op->q < prev_q);
        REQUIRE(op->h < prev_h);
        prev_q = op->q;
        prev_h = op->h;
    }
}

TEST_CASE("curve validation rejects bad shapes") {
    CHECK_THROWS_AS(validate(PumpCurve{-1.0, -5e-4, -9e-4, 50.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PumpCurve{15.0, 5e-4, -9e-4, 50.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PumpCurve{15.0, -5e-4, 9e-4, 50.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemCurve{-0.1, 6e-4}), std::invalid_argument);
    CHECK_THROWS_AS(validate(SystemCurve{2.0, 0.0}), std::invalid_argument);
    CHECK_NOTHROW(validate(kPump));
    CHECK_NOTHROW(validate(kSystem));
}
