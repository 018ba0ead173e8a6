#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/pipeline.hpp"
#include "pumpsim/station.hpp"

using namespace pumpsim;
using Catch::Approx;

TEST_CASE("nominal frequency inference picks the running plateau") {
    StationConfig c;
    c.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0};
    std::vector<double> inflow(2 * 3600, 70.0);
    const auto ts = simulate_scenario(c, inflow, {}, 3);
    CHECK(infer_f_nominal(ts) == Approx(50.0));
}

TEST_CASE("nominal curve fit recovers the configured curves from telemetry") {
    StationConfig c; // 1% sensor noise
    std::vector<double> inflow(6 * 3600, 70.0);
    const auto ts = simulate_scenario(c, inflow, {}, 19);
    const auto nc = fit_nominal_curves(ts, 1, 50.0, 21600.0);
    CHECK(nc.pump.c0 == Approx(c.pump.c0).epsilon(0.05));
    CHECK(nc.system.h_static == Approx(c.system.h_static).margin(0.25));
    CHECK(nc.system.k == Approx(c.system.k).epsilon(0.1));
    // the quadratic term is tiny; what matters is the head profile it implies
    const auto op_true = solve_operating_point(c.pump, c.system, 1.0);
    const auto op_fit = solve_operating_point(nc.pump, nc.system, 1.0);
    REQUIRE(op_true.has_value());
    REQUIRE(op_fit.has_value());
    CHECK(op_fit->q == Approx(op_true->q).epsilon(0.02));
}

TEST_CASE("segment aggregation groups 25-sample blocks per cycle") {
    std::vector<Cycle> cycles(2);
    for (int c = 0; c < 2; ++c) {
        cycles[static_cast<std::size_t>(c)].pump_id = 1;
        for (int i = 0; i < 60; ++i)
            cycles[static_cast<std::size_t>(c)].samples.push_back(
                CycleSample{c * 1000.0 + i, 100.0, 8.0, 50.0, 100.0 + i, 8.0});
    }
    const auto pts = aggregate_segments(cycles, 25);
    REQUIRE(pts.size() == 4); // two full blocks per cycle, remainder dropped
    CHECK(pts[0].cycle == 0);
    CHECK(pts[2].cycle == 1);
    CHECK(pts[0].q_star == Approx(112.0)); // mean of 100..124
    CHECK(pts[1].q_star == Approx(137.0)); // mean of 125..149
}

TEST_CASE("cycle truth labels cover the approach gap") {
    // hand-built series: fault window 100..200, cycles at 50..80, 220..260
    TimeSeries ts;
    ts.n_pumps = 1;
    for (int t = 0; t < 300; ++t) {
        Record r;
        r.t = t;
        r.pumps.resize(1);
        if (t >= 100 && t <= 200) r.label = GroundTruth{FaultKind::pump, 1};
        ts.records.push_back(r);
    }
    std::vector<Cycle> cycles(2);
    cycles[0] = Cycle{1, 50.0, 80.0, {}};
    cycles[1] = Cycle{1, 220.0, 260.0, {}};
    const auto truth = cycle_truth_labels(ts, cycles, 1);
    REQUIRE(truth.size() == 2);
    CHECK(truth[0] == DiagLabel::normal);
    CHECK(truth[1] == DiagLabel::pump_fault); // fault developed inside its gap
}
