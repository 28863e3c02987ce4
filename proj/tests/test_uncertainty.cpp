#include <catch2/catch.hpp>

#include <cmath>

#include "adnplan/uncertainty.hpp"
#include "support/quadrature.hpp"

using namespace adnplan;

namespace {
const WTCurve kCurve{3.0, 12.0, 25.0, 100.0};
const WeibullParams kWind{2.0, 8.0};
}  // namespace

TEST_CASE("weibull pdf matches hand evaluation") {
    CHECK(weibull_pdf(0.0, kWind) == 0.0);
    CHECK(weibull_pdf(8.0, kWind) == Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(weibull_pdf(5.0, WeibullParams{-1.0, 8.0}), std::invalid_argument);
    CHECK_THROWS_AS(weibull_pdf(5.0, WeibullParams{2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(weibull_pdf(-0.1, kWind), std::invalid_argument);
}

TEST_CASE("weibull pdf integrates to one") {
    for (double t : {1.5, 2.0, 3.5}) {
        for (double gamma : {5.0, 8.0, 11.0}) {
            const WeibullParams wp{t, gamma};
            const double integral = testsupport::integrate(
                [&](double v) { return weibull_pdf(v, wp); }, 0.0, gamma * 12.0, 2000);
            CHECK(integral == Approx(1.0).margin(1e-6));
        }
    }
}

TEST_CASE("turbine power curve") {
    CHECK(wt_power(2.0, kCurve) == 0.0);
    CHECK(wt_power(12.0, kCurve) == 100.0);
    CHECK(wt_power(7.5, kCurve) == Approx(50.0));
    CHECK(wt_power(25.0, kCurve) == 0.0);  // cut-out excluded
    CHECK(wt_power(24.999, kCurve) == 100.0);

    SECTION("monotone and piecewise linear below rated") {
        double prev = -1.0;
        for (double v = 0.0; v <= kCurve.v_rated_ms; v += 0.05) {
            const double p = wt_power(v, kCurve);
            CHECK(p >= prev);
            prev = p;
        }
        // interior linearity on the ramp
        for (double v = 3.5; v < 11.5; v += 0.7) {
            const double mid = wt_power(v, kCurve);
            const double avg = 0.5 * (wt_power(v - 0.25, kCurve) + wt_power(v + 0.25, kCurve));
            CHECK(mid == Approx(avg).margin(1e-12));
        }
    }
    CHECK_THROWS_AS(wt_power(5.0, WTCurve{12.0, 3.0, 25.0, 100.0}), std::invalid_argument);
}

TEST_CASE("turbine output density and point masses") {
    CHECK(wt_output_pdf(kCurve.p_rated_kw + 1.0, kCurve, kWind) == 0.0);
    CHECK(wt_output_pdf(-0.5, kCurve, kWind) == 0.0);

    const double rated = wt_rated_mass(kCurve, kWind);
    const double expected =
        std::exp(-std::pow(12.0 / 8.0, 2.0)) - std::exp(-std::pow(25.0 / 8.0, 2.0));
    CHECK(rated == Approx(expected).epsilon(1e-12));

    const double continuous = testsupport::integrate(
        [&](double p) { return wt_output_pdf(p, kCurve, kWind); }, 0.0, kCurve.p_rated_kw, 2000);
    const double total = continuous + rated + wt_zero_mass(kCurve, kWind);
    CHECK(total == Approx(1.0).margin(1e-6));
}

TEST_CASE("turbine output density equals the transformed wind density") {
    // push the wind density through the ramp numerically and compare
    const auto v_of_p = [&](double p) {
        return kCurve.v_cut_in_ms +
               (kCurve.v_rated_ms - kCurve.v_cut_in_ms) * p / kCurve.p_rated_kw;
    };
    const double h = 1e-5;
    for (double p = 1.0; p < kCurve.p_rated_kw; p += 7.3) {
        const double dv_dp = (v_of_p(p + h) - v_of_p(p - h)) / (2.0 * h);
        const double transformed = weibull_pdf(v_of_p(p), kWind) * dv_dp;
        CHECK(wt_output_pdf(p, kCurve, kWind) == Approx(transformed).epsilon(1e-8));
    }
}

TEST_CASE("turbine cumulative matches quadrature of the density") {
    const auto dist = wt_output_distribution(kCurve, kWind);
    for (double p : {10.0, 37.0, 80.0, 100.0}) {
        const double numeric = testsupport::integrate(dist.density, 0.0, p, 1200);
        CHECK(dist.cumulative(p) == Approx(numeric).margin(1e-9));
    }
}

TEST_CASE("beta shapes from moments") {
    const BetaParams bp = beta_shapes_from_moments(0.5, 0.05);
    CHECK(bp.lambda1 == Approx(2.0).epsilon(1e-12));
    CHECK(bp.lambda2 == Approx(2.0).epsilon(1e-12));

    SECTION("symmetric mean gives equal shapes") {
        for (double sigma2 : {0.01, 0.1, 0.2}) {
            const BetaParams b = beta_shapes_from_moments(0.5, sigma2);
            CHECK(b.lambda1 == Approx(b.lambda2).epsilon(1e-12));
        }
    }
    SECTION("implied mean round-trips") {
        for (double mu : {0.2, 0.5, 0.8}) {
            for (double sigma2 : {0.01, 0.05}) {
                const BetaParams b = beta_shapes_from_moments(mu, sigma2);
                CHECK(b.lambda1 / (b.lambda1 + b.lambda2) == Approx(mu).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(beta_shapes_from_moments(0.5, 0.25), InfeasibleMomentsError);
    CHECK_THROWS_AS(beta_shapes_from_moments(0.5, 0.30), InfeasibleMomentsError);
    CHECK_THROWS_AS(beta_shapes_from_moments(1.2, 0.05), std::invalid_argument);
}

TEST_CASE("pv output density") {
    const BetaParams bell{2.0, 2.0, 50.0};
    CHECK(pv_output_pdf(25.0, bell) == Approx(1.5 / 50.0).epsilon(1e-12));
    CHECK(pv_output_pdf(60.0, bell) == 0.0);

    const BetaParams uniform{1.0, 1.0, 50.0};
    for (double p : {0.0, 10.0, 49.0})
        CHECK(pv_output_pdf(p, uniform) == Approx(1.0 / 50.0).epsilon(1e-12));

    for (const BetaParams& bp : {bell, BetaParams{0.8, 3.0, 20.0}, BetaParams{4.0, 1.5, 10.0}}) {
        const double integral = testsupport::integrate(
            [&](double p) { return pv_output_pdf(p, bp); }, 1e-9, bp.p_max_kw - 1e-9, 4000);
        CHECK(integral == Approx(1.0).margin(1e-5));
    }
}

TEST_CASE("regularized incomplete beta agrees with quadrature") {
    // intervals stay clear of the endpoints, where shapes below one make the
    // density singular and quadrature unreliable
    for (const BetaParams& bp : {BetaParams{2.0, 2.0, 1.0}, BetaParams{0.7, 2.5, 1.0},
                                 BetaParams{5.0, 1.2, 1.0}}) {
        for (double x : {0.3, 0.45, 0.9}) {
            const double numeric = testsupport::integrate(
                [&](double p) { return pv_output_pdf(p, bp); }, 0.2, x, 4000);
            const double analytic =
                regularized_incomplete_beta(bp.lambda1, bp.lambda2, x) -
                regularized_incomplete_beta(bp.lambda1, bp.lambda2, 0.2);
            CHECK(analytic == Approx(numeric).margin(1e-9));
        }
    }
}

TEST_CASE("pv power from irradiance") {
    const PVPanelSpec spec{0.9, 10.0, 0.2, 0.0};
    CHECK(pv_power_from_irradiance(0.0, spec) == 0.0);
    CHECK(pv_power_from_irradiance(1000.0, spec) == Approx(1.8).epsilon(1e-12));
    CHECK(pv_power_from_irradiance(500.0, spec) * 2.0 ==
          Approx(pv_power_from_irradiance(1000.0, spec)).epsilon(1e-12));
    CHECK_THROWS_AS(pv_power_from_irradiance(-1.0, spec), std::invalid_argument);
    CHECK_THROWS_AS(pv_power_from_irradiance(1.0, PVPanelSpec{1.4, 10.0, 0.2, 0.0}),
                    std::invalid_argument);
}
