#include <catch2/catch_amalgamated.hpp>

#include "pumpsim/diagnostics.hpp"

using namespace pumpsim;
using Catch::Approx;

TEST_CASE("static fit recovers exact quadratic data") {
    std::vector<QhSample> pts;
    for (double q : {20.0, 60.0, 95.0, 130.0})
        pts.push_back({q, 15.0 - 5e-4 * q - 9e-4 * q * q});
    const auto fit = fit_static_quadratic(pts);
    REQUIRE(fit.has_value());
    CHECK(fit->theta[0] == Approx(15.0).epsilon(1e-9));
    CHECK(fit->theta[1] == Approx(-5e-4).margin(1e-9));
    CHECK(fit->theta[2] == Approx(-9e-4).margin(1e-11));
    CHECK(fit->ssr < 1e-18);
    CHECK(fit->n_params == 3);
}

TEST_CASE("static fit flags a singular design") {
    std::vector<QhSample> pts{{50.0, 1.0}, {50.0, 2.0}, {50.0, 3.0}, {50.0, 4.0}};
    CHECK_FALSE(fit_static_quadratic(pts).has_value());
}

TEST_CASE("drift fit interpolates exact six-parameter data") {
    std::vector<TqhSample> pts;
    for (int t = 0; t < 10; ++t)
        for (double q : {30.0, 80.0, 120.0}) {
            const double h = (15.0 - 0.05 * t) + (-5e-4 - 1e-5 * t) * q +
                             (-9e-4 - 2e-6 * t) * q * q;
            pts.push_back({static_cast<double>(t), q, h});
        }
    const auto fit = fit_drift_quadratic(pts);
    REQUIRE(fit.has_value());
    CHECK(fit->ssr < 1e-15);
    CHECK(fit->theta[0] == Approx(15.0).epsilon(1e-7));
    CHECK(fit->theta[3] == Approx(-0.05).epsilon(1e-6));
    CHECK(fit->theta[4] == Approx(-1e-5).margin(1e-9));
    CHECK(fit->theta[5] == Approx(-2e-6).margin(1e-10));
}

TEST_CASE("zero-drift data yields near-zero slopes") {
    Rng rng(51);
    std::vector<TqhSample> pts;
    for (int t = 0; t < 50; ++t) {
        const double q = 60.0 + 40.0 * rng.uniform();
        const double h = 15.0 - 5e-4 * q - 9e-4 * q * q + rng.normal(0.0, 0.05);
        pts.push_back({static_cast<double>(t), q, h});
    }
    const auto fit = fit_drift_quadratic(pts);
    REQUIRE(fit.has_value());
    CHECK(std::fabs(fit->theta[3]) < 0.05);
}

TEST_CASE("nesting: the drift fit never fits worse") {
    Rng rng(53);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<QhSample> st;
        std::vector<TqhSample> dr;
        for (int t = 0; t < 30; ++t) {
            const double q = 50.0 + 60.0 * rng.uniform();
            const double h = 12.0 - 1e-3 * q - 8e-4 * q * q + rng.normal(0.0, 0.3) +
                             0.01 * t * rng.uniform();
            st.push_back({q, h});
            dr.push_back({static_cast<double>(t), q, h});
        }
        const auto f0 = fit_static_quadratic(st);
        const auto f1 = fit_drift_quadratic(dr);
        REQUIRE(f0.has_value());
        REQUIRE(f1.has_value());
        REQUIRE(f1->ssr <= f0->ssr * (1.0 + 1e-12));
    }
}

TEST_CASE("nested F-test mechanics") {
    QuadraticFit f0, f1;
    f0.n_params = 3;
    f1.n_params = 6;
    f0.m = f1.m = 50;
    f0.ssr = 264.6;
    f1.ssr = 18.37;
    const auto r = nested_f_test(f0, f1);
    CHECK(r.df1 == 3);
    CHECK(r.df2 == 44);
    CHECK(r.f_stat == Approx(196.6).margin(0.5));
    CHECK(r.p_value < 1e-15);
    CHECK(r.aic_alt < r.aic_null);

    // equal SSR: no improvement at all
    f1.ssr = f0.ssr;
    const auto flat = nested_f_test(f0, f1);
    CHECK(flat.f_stat == Approx(0.0));
    CHECK(flat.p_value == Approx(1.0));

    // degenerate: the drift model interpolates
    f1.ssr = 0.0;
    const auto perfect = nested_f_test(f0, f1);
    CHECK(perfect.perfect_fit);
    CHECK(perfect.p_value == 0.0);
}

TEST_CASE("aic trades fit against complexity") {
    CHECK(aic(264.6, 50, 3) == Approx(50.0 * std::log(264.6 / 50.0) + 6.0));
    CHECK(aic(18.37, 50, 6) == Approx(50.0 * std::log(18.37 / 50.0) + 12.0));
    // the values behind the statistic examples above
    CHECK(aic(264.6, 50, 3) == Approx(89.31).margin(0.05));
    CHECK(aic(18.37, 50, 6) == Approx(-38.07).margin(0.05));
}
