#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/diagnostics.hpp"

using namespace pumpsim;
using Catch::Approx;

namespace {
const PumpCurve kPump{15.0, -5e-4, -9e-4, 50.0};
const SystemCurve kSystem{2.0, 6e-4};

std::vector<TqhSample> slide_on_system(double q0, double v, int n) {
    std::vector<TqhSample> out;
    for (int i = 0; i < n; ++i) {
        const double q = q0 - v * i;
        out.push_back({static_cast<double>(i), q, system_head(kSystem, q)});
    }
    return out;
}

std::vector<TqhSample> slide_on_pump(double q0, double v, int n) {
    std::vector<TqhSample> out;
    for (int i = 0; i < n; ++i) {
        const double q = q0 - v * i;
        out.push_back({static_cast<double>(i), q, pump_head(kPump, q, 1.0)});
    }
    return out;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}
}  // namespace

TEST_CASE("pure pump drift slides along the system curve") {
    const auto res = tangent_residuals(slide_on_system(92.0, 0.4, 50), kPump, kSystem, 5);
    CHECK(max_abs(res.psi_s) < 1e-8);
    CHECK(max_abs(res.psi_p) > 1e-3); // the opposing channel clearly fires
}

TEST_CASE("pure system drift slides along the pump curve") {
    const auto res = tangent_residuals(slide_on_pump(92.0, 0.4, 50), kPump, kSystem, 5);
    CHECK(max_abs(res.psi_p) < 1e-8);
    CHECK(max_abs(res.psi_s) > 1e-3);
}

TEST_CASE("exact tangency holds for any odd smoothing window") {
    for (int w : {1, 3, 9}) {
        const auto res = tangent_residuals(slide_on_system(90.0, 0.55, 50), kPump, kSystem, w);
        CHECK(max_abs(res.psi_s) < 1e-8);
    }
}

TEST_CASE("residual computation guards its inputs") {
    CHECK_THROWS_AS(tangent_residuals(slide_on_system(90.0, 0.1, 6), kPump, kSystem, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(tangent_residuals(slide_on_system(90.0, 0.1, 50), kPump, kSystem, 4),
                    std::invalid_argument);
    CHECK_NOTHROW(tangent_residuals(slide_on_system(90.0, 0.1, 7), kPump, kSystem, 5));
}

TEST_CASE("decision index attribution") {
    CHECK(decision_index({0.5, 0.7, 0.6}, {0.0, 0.0, 0.0}) == Approx(1.0));
    CHECK(decision_index({0.0, 0.0, 0.0}, {0.2, 0.3, 0.4}) == Approx(0.0));
    CHECK(decision_index({0.0, 0.0}, {0.0, 0.0}) == Approx(0.5));
    // invariant under common positive rescaling
    const std::vector<double> p{0.1, 0.4, 0.2}, s{0.3, 0.1, 0.2};
    std::vector<double> p9 = p, s9 = s;
    for (auto& x : p9) x *= 9.0;
    for (auto& x : s9) x *= 9.0;
    CHECK(decision_index(p, s) == Approx(decision_index(p9, s9)).epsilon(1e-12));
    CHECK(decision_index(p, s) >= 0.0);
    CHECK(decision_index(p, s) <= 1.0);
    CHECK_THROWS_AS(decision_index({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(decision_index({0.1}, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("bootstrap of a constant series collapses to a point") {
    Rng rng(61);
    const std::vector<double> p(40, 0.3), s(40, 0.1);
    const auto ci = bootstrap_index_ci(p, s, 5, 500, 0.05, rng);
    CHECK(ci.lower == Approx(0.75));
    CHECK(ci.upper == Approx(0.75));
}

TEST_CASE("bootstrap CI brackets the point estimate") {
    Rng gen(67);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(60), s(60);
        const double bias = 0.5 + 1.5 * gen.uniform();
        for (int i = 0; i < 60; ++i) {
            p[static_cast<std::size_t>(i)] = std::fabs(gen.normal(0.0, 1.0)) * bias;
            s[static_cast<std::size_t>(i)] = std::fabs(gen.normal(0.0, 1.0));
        }
        const double iw = decision_index(p, s);
        Rng rng(1000 + static_cast<std::uint64_t>(trial));
        const auto ci = bootstrap_index_ci(p, s, 0, 400, 0.05, rng);
        REQUIRE(ci.lower <= iw);
        REQUIRE(ci.upper >= iw);
    }
}

TEST_CASE("bootstrap CI narrows with segment length") {
    auto make = [](int n, std::uint64_t seed) {
        Rng g(seed);
        std::vector<double> p(static_cast<std::size_t>(n)), s(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            p[static_cast<std::size_t>(i)] = std::fabs(g.normal(0.0, 1.0)) * 1.4;
            s[static_cast<std::size_t>(i)] = std::fabs(g.normal(0.0, 1.0));
        }
        return std::make_pair(p, s);
    };
    double width25 = 0.0, width100 = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [p1, s1] = make(25, 100 + seed);
        const auto [p2, s2] = make(100, 200 + seed);
        Rng r1(seed), r2(seed + 77);
        const auto c1 = bootstrap_index_ci(p1, s1, 0, 500, 0.05, r1);
        const auto c2 = bootstrap_index_ci(p2, s2, 0, 500, 0.05, r2);
        width25 += c1.upper - c1.lower;
        width100 += c2.upper - c2.lower;
    }
    CHECK(width100 < width25);
}

TEST_CASE("bootstrap is deterministic per seed") {
    std::vector<double> p(30), s(30);
    Rng g(71);
    for (int i = 0; i < 30; ++i) {
        p[static_cast<std::size_t>(i)] = std::fabs(g.normal(0.0, 1.0));
        s[static_cast<std::size_t>(i)] = std::fabs(g.normal(0.0, 1.0));
    }
    Rng r1(5), r2(5);
    const auto c1 = bootstrap_index_ci(p, s, 0, 300, 0.05, r1);
    const auto c2 = bootstrap_index_ci(p, s, 0, 300, 0.05, r2);
    CHECK(c1.lower == c2.lower);
    CHECK(c1.upper == c2.upper);
}
