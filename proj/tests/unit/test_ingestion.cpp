#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/ingestion.hpp"
#include "pumpsim/station.hpp"

using namespace pumpsim;
using Catch::Approx;

TEST_CASE("level preprocessing: window offset, dedup, gap audit") {
    ScadaFrame f;
    for (int t = 0; t < 20; ++t) f.rows.push_back(ScadaRow{static_cast<double>(t), {0}, 1.0});
    f.rows.push_back(f.rows.back()); // exact duplicate
    f.rows.push_back(ScadaRow{35.0, {0}, 1.2}); // 15 s jump

    const auto out = preprocess_levels(f, 5.0, 9.0, 0.8);
    REQUIRE(out.rows.size() == 21);
    CHECK(out.rows[4].level_m == Approx(1.0));
    CHECK(out.rows[5].level_m == Approx(1.8));
    CHECK(out.rows[9].level_m == Approx(1.8));
    CHECK(out.rows[10].level_m == Approx(1.0));
    REQUIRE(out.gap_audit.size() == 1);
    CHECK(out.gap_audit[0].gap_s == Approx(16.0));

    // a window covering no rows changes nothing and audits nothing new
    const auto same = preprocess_levels(f, 1000.0, 2000.0, 0.8);
    REQUIRE(same.rows.size() == 21);
    CHECK(same.rows[5].level_m == Approx(1.0));

    // dedup and audit are idempotent
    const auto again = preprocess_levels(out, 1000.0, 2000.0, 0.8);
    CHECK(again.rows.size() == out.rows.size());
    CHECK(again.gap_audit.size() == out.gap_audit.size());

    CHECK_THROWS_AS(preprocess_levels(f, 9.0, 5.0, 0.8), std::invalid_argument);
}

TEST_CASE("constant level with no pumps infers zero inflow") {
    ScadaFrame f;
    for (int t = 0; t < 50; ++t) f.rows.push_back(ScadaRow{static_cast<double>(t), {0, 0, 0}, 2.0});
    const auto inferred = infer_inflow(f, 8.0, PumpCurve{45.0, -5e-4, -2.5e-4, 50.0},
                                       SystemCurve{2.0, 3e-4});
    REQUIRE_FALSE(inferred.q_m3h.empty());
    for (double q : inferred.q_m3h) CHECK(q == Approx(0.0).margin(1e-12));
}

TEST_CASE("spike rows are discarded") {
    ScadaFrame f;
    for (int t = 0; t < 10; ++t) f.rows.push_back(ScadaRow{static_cast<double>(t), {0}, 1.0});
    f.rows[5].level_m = 1.0 + 0.5 * 3600.0 / 8.0 / 3600.0 * 2.0; // 0.5 m3/s centered jump
    const auto inferred = infer_inflow(f, 8.0, PumpCurve{45.0, -5e-4, -2.5e-4, 50.0},
                                       SystemCurve{2.0, 3e-4});
    for (std::size_t i = 0; i < inferred.t.size(); ++i) {
        CHECK(inferred.q_m3h[i] <= 0.4 * 3600.0);
    }
    CHECK(inferred.t.size() < 10); // at least the spike rows vanished
    CHECK_THROWS_AS(infer_inflow(ScadaFrame{}, 8.0, PumpCurve{45.0, -5e-4, -2.5e-4, 50.0},
                                 SystemCurve{2.0, 3e-4}),
                    std::invalid_argument);
}

TEST_CASE("closed loop: inferred inflow matches the injected series") {
    StationConfig c;
    c.noise = NoiseSpec{0.0, 0.0, 0.0, 0.0};
    std::vector<double> inflow(4 * 3600);
    for (std::size_t i = 0; i < inflow.size(); ++i)
        inflow[i] = 60.0 + 25.0 * std::sin(2.0 * 3.14159265358979 * static_cast<double>(i) / 7200.0);
    const auto ts = simulate_scenario(c, inflow, {}, 47);
    const auto frame = frame_from_timeseries(ts);
    const auto inferred = infer_inflow(frame, c.area_m2, c.pump, c.system);

    // align on timestamps, compare against the injection
    std::vector<double> ref, sim;
    for (std::size_t i = 0; i < inferred.t.size(); ++i) {
        const auto t = static_cast<std::size_t>(inferred.t[i]);
        if (t >= inflow.size()) continue;
        ref.push_back(inflow[t]);
        sim.push_back(inferred.q_m3h[i]);
    }
    REQUIRE(ref.size() > 3 * 3600u);
    CHECK(nmae(sim, ref) < 0.02);
}

TEST_CASE("nmae definition and guards") {
    const std::vector<double> ref{0.0, 5.0, 10.0};
    CHECK(nmae(ref, ref) == Approx(0.0));
    const std::vector<double> shifted{1.0, 6.0, 11.0};
    CHECK(nmae(shifted, ref) == Approx(0.10));
    CHECK_THROWS_AS(nmae({1.0, 1.0}, {2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(nmae({1.0}, {1.0, 2.0}), std::invalid_argument);
}
