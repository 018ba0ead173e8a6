#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/diagnostics.hpp"

using namespace pumpsim;
using Catch::Approx;

namespace {
const PumpCurve kPump{15.0, -5e-4, -9e-4, 50.0};
const SystemCurve kSystem{2.0, 6e-4};
}  // namespace

TEST_CASE("threshold learning") {
    // tight normal cluster keeps the defaults
    std::vector<SegmentStats> tight;
    for (double v : {0.48, 0.5, 0.52, 0.49, 0.51, 0.5})
        tight.push_back(SegmentStats{v, 0.01});
    const auto th = learn_thresholds(tight);
    CHECK(th.pump_lci == Approx(0.6));
    CHECK(th.system_uci == Approx(0.4));
    CHECK(th.motion_floor > 0.0);

    // spread-out normal behaviour widens both bands
    std::vector<SegmentStats> wide;
    for (double v : {0.35, 0.42, 0.5, 0.58, 0.65, 0.37, 0.63})
        wide.push_back(SegmentStats{v, 0.02});
    const auto tw = learn_thresholds(wide);
    CHECK(tw.pump_lci > 0.6);
    CHECK(tw.system_uci < 0.4);

    CHECK_THROWS(learn_thresholds({SegmentStats{0.5, 0.1}, SegmentStats{0.5, 0.1}}));
}

TEST_CASE("segment classification rules") {
    const Thresholds th{0.6, 0.4, 0.05};
    CHECK(classify_segment(SegmentStats{0.75, 1.0}, {0.66, 0.81}, th) == DiagLabel::pump_fault);
    CHECK(classify_segment(SegmentStats{0.2, 1.0}, {0.1, 0.3}, th) == DiagLabel::system_fault);
    CHECK(classify_segment(SegmentStats{0.5, 1.0}, {0.35, 0.65}, th) == DiagLabel::normal);
    // strong index but no motion: stays normal
    CHECK(classify_segment(SegmentStats{0.9, 0.01}, {0.8, 0.95}, th) == DiagLabel::normal);
}

TEST_CASE("f-test cycle classifier separates residual drift by origin") {
    // points slide along the system curve (pump-side change): the residual
    // against the nominal pump curve trends, the system residual stays flat
    std::vector<TqhSample> pump_side;
    for (int i = 0; i < 40; ++i) {
        const double q = 92.0 - 0.3 * i;
        pump_side.push_back({static_cast<double>(i), q, system_head(kSystem, q)});
    }
    const auto a = classify_by_ftest(pump_side, kPump, kSystem, 0.01);
    CHECK(a.label == DiagLabel::pump_fault);

    // points slide along the pump curve (system-side change)
    std::vector<TqhSample> system_side;
    for (int i = 0; i < 40; ++i) {
        const double q = 92.0 - 0.3 * i;
        system_side.push_back({static_cast<double>(i), q, pump_head(kPump, q, 1.0)});
    }
    const auto b = classify_by_ftest(system_side, kPump, kSystem, 0.01);
    CHECK(b.label == DiagLabel::system_fault);

    // stationary healthy cluster: nothing to reject
    Rng rng(73);
    std::vector<TqhSample> healthy;
    for (int i = 0; i < 40; ++i) {
        const double q = 92.9 + rng.normal(0.0, 0.9);
        healthy.push_back(
            {static_cast<double>(i), q, system_head(kSystem, q) + rng.normal(0.0, 0.07)});
    }
    const auto c = classify_by_ftest(healthy, kPump, kSystem, 0.01);
    CHECK(c.label == DiagLabel::normal);

    CHECK_THROWS_AS(classify_by_ftest({pump_side.begin(), pump_side.begin() + 5}, kPump,
                                      kSystem, 0.01),
                    std::invalid_argument);
}

TEST_CASE("a developed static fault no longer trends within the cycle") {
    // cluster sitting well off the nominal pump curve but not moving: the
    // intercept null absorbs the offset, so the verdict is normal
    Rng rng(79);
    std::vector<TqhSample> parked;
    for (int i = 0; i < 40; ++i) {
        const double q = 70.0 + rng.normal(0.0, 0.7);
        parked.push_back(
            {static_cast<double>(i), q, system_head(kSystem, q) + rng.normal(0.0, 0.05)});
    }
    const auto out = classify_by_ftest(parked, kPump, kSystem, 0.01);
    CHECK(out.label == DiagLabel::normal);
}

TEST_CASE("noiseless healthy cycles never trip the classifier") {
    // identical points except numerical dust: the SSR floor keeps this normal
    std::vector<TqhSample> flat;
    for (int i = 0; i < 30; ++i) {
        const double q = 92.928657 + 1e-9 * i;
        flat.push_back({static_cast<double>(i), q, system_head(kSystem, q)});
    }
    const auto out = classify_by_ftest(flat, kPump, kSystem, 0.01);
    CHECK(out.label == DiagLabel::normal);
}

TEST_CASE("confusion matrix metrics") {
    using L = DiagLabel;
    const std::vector<L> truth{L::normal, L::normal, L::pump_fault, L::pump_fault,
                               L::system_fault};
    const auto perfect = classification_metrics(truth, truth);
    CHECK(perfect.macro().precision == Approx(1.0));
    CHECK(perfect.macro().recall == Approx(1.0));
    CHECK(perfect.macro().f1 == Approx(1.0));
    CHECK(perfect.cross_confusions() == 0);

    const std::vector<L> all_normal(truth.size(), L::normal);
    const auto degenerate = classification_metrics(all_normal, truth);
    CHECK(degenerate.metrics(L::pump_fault).recall == Approx(0.0));
    CHECK(degenerate.metrics(L::system_fault).recall == Approx(0.0));
    CHECK(degenerate.metrics(L::pump_fault).precision == Approx(0.0)); // 0/0 convention

    const std::vector<L> crossed{L::normal, L::normal, L::system_fault, L::pump_fault,
                                 L::pump_fault};
    CHECK(classification_metrics(crossed, truth).cross_confusions() == 2);

    CHECK_THROWS_AS(classification_metrics({L::normal}, truth), std::invalid_argument);
}
