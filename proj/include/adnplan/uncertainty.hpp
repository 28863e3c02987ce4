// Probabilistic output models for wind turbines and photovoltaic units:
// Weibull wind speeds, piecewise-linear turbine power curves, Beta-distributed
// solar output, and the mixed (atoms + density) distributions they induce.
#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace adnplan {

struct WeibullParams {
    double shape_t = 2.0;     // dimensionless
    double scale_gamma = 8.0; // m/s
};

struct WTCurve {
    double v_cut_in_ms = 3.0;
    double v_rated_ms = 12.0;
    double v_cut_out_ms = 25.0;
    double p_rated_kw = 1.0;
};

struct BetaParams {
    double lambda1 = 2.0;
    double lambda2 = 2.0;
    double p_max_kw = 1.0;
};

struct PVPanelSpec {
    double eta_mppt = 0.9;          // fraction in (0,1]
    double area_m2 = 10.0;
    double eta_conversion = 0.2;    // fraction in (0,1]
    double incident_angle_rad = 0.0;
};

struct InfeasibleMomentsError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void check_weibull(const WeibullParams& wp, const char* where) {
    if (!(wp.shape_t > 0.0) || !(wp.scale_gamma > 0.0))
        throw std::invalid_argument(std::string(where) + ": Weibull shape and scale must be positive");
}

inline void check_curve(const WTCurve& c, const char* where) {
    if (!(0.0 < c.v_cut_in_ms && c.v_cut_in_ms < c.v_rated_ms && c.v_rated_ms < c.v_cut_out_ms))
        throw std::invalid_argument(std::string(where) + ": require 0 < v_cut_in < v_rated < v_cut_out");
    if (!(c.p_rated_kw > 0.0))
        throw std::invalid_argument(std::string(where) + ": rated power must be positive");
}

inline void check_beta(const BetaParams& bp, const char* where) {
    if (!(bp.lambda1 > 0.0) || !(bp.lambda2 > 0.0))
        throw std::invalid_argument(std::string(where) + ": Beta shape factors must be positive");
    if (!(bp.p_max_kw > 0.0))
        throw std::invalid_argument(std::string(where) + ": maximum output must be positive");
}

inline double log_beta(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued-fraction evaluation of the regularized incomplete beta I_x(a,b)
// (modified Lentz method).
inline double incbeta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-15;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 300; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace detail

inline double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::invalid_argument("regularized_incomplete_beta: shapes must be positive");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front =
        std::exp(a * std::log(x) + b * std::log1p(-x) - detail::log_beta(a, b));
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::incbeta_cf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - detail::log_beta(b, a)) *
                     detail::incbeta_cf(b, a, 1.0 - x) / b;
}

inline double weibull_pdf(double v, const WeibullParams& wp) {
    detail::check_weibull(wp, "weibull_pdf");
    if (v < 0.0) throw std::invalid_argument("weibull_pdf: wind speed must be non-negative");
    const double z = v / wp.scale_gamma;
    return (wp.shape_t / wp.scale_gamma) * std::pow(z, wp.shape_t - 1.0) *
           std::exp(-std::pow(z, wp.shape_t));
}

inline double weibull_cdf(double v, const WeibullParams& wp) {
    detail::check_weibull(wp, "weibull_cdf");
    if (v <= 0.0) return 0.0;
    return 1.0 - std::exp(-std::pow(v / wp.scale_gamma, wp.shape_t));
}

// Speed-to-power curve: zero outside [v_cut_in, v_cut_out), linear ramp up to
// rated speed, flat plateau afterwards.
inline double wt_power(double v, const WTCurve& c) {
    detail::check_curve(c, "wt_power");
    if (v < 0.0) throw std::invalid_argument("wt_power: wind speed must be non-negative");
    if (v < c.v_cut_in_ms || v >= c.v_cut_out_ms) return 0.0;
    if (v >= c.v_rated_ms) return c.p_rated_kw;
    return (v - c.v_cut_in_ms) / (c.v_rated_ms - c.v_cut_in_ms) * c.p_rated_kw;
}

// Probability that the turbine idles (speed below cut-in or above cut-out).
inline double wt_zero_mass(const WTCurve& c, const WeibullParams& wp) {
    detail::check_curve(c, "wt_zero_mass");
    return weibull_cdf(c.v_cut_in_ms, wp) + (1.0 - weibull_cdf(c.v_cut_out_ms, wp));
}

// Probability of the rated-output plateau.
inline double wt_rated_mass(const WTCurve& c, const WeibullParams& wp) {
    detail::check_curve(c, "wt_rated_mass");
    detail::check_weibull(wp, "wt_rated_mass");
    const double zr = c.v_rated_ms / wp.scale_gamma;
    const double zo = c.v_cut_out_ms / wp.scale_gamma;
    return std::exp(-std::pow(zr, wp.shape_t)) - std::exp(-std::pow(zo, wp.shape_t));
}

// Density of the continuous (ramp) part of the turbine output. The atoms at
// zero and at rated power are exposed separately; without them the total
// probability would fall short of one.
inline double wt_output_pdf(double p, const WTCurve& c, const WeibullParams& wp) {
    detail::check_curve(c, "wt_output_pdf");
    detail::check_weibull(wp, "wt_output_pdf");
    if (p < 0.0 || p > c.p_rated_kw) return 0.0;
    const double h = c.v_rated_ms / c.v_cut_in_ms - 1.0;
    const double u = (1.0 + h * p / c.p_rated_kw) * c.v_cut_in_ms / wp.scale_gamma;
    return (wp.shape_t * h * c.v_cut_in_ms / (wp.scale_gamma * c.p_rated_kw)) *
           std::pow(u, wp.shape_t - 1.0) * std::exp(-std::pow(u, wp.shape_t));
}

inline BetaParams beta_shapes_from_moments(double mu, double sigma2, double p_max_kw = 1.0) {
    if (!(mu > 0.0 && mu < 1.0))
        throw std::invalid_argument("beta_shapes_from_moments: mean must lie in (0,1)");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("beta_shapes_from_moments: variance must be positive");
    if (sigma2 >= mu * (1.0 - mu))
        throw InfeasibleMomentsError("beta_shapes_from_moments: variance must be below mu*(1-mu)");
    const double factor = mu * (1.0 - mu) / sigma2 - 1.0;
    return BetaParams{mu * factor, (1.0 - mu) * factor, p_max_kw};
}

// Beta density in p/p_max, rescaled so it integrates to one over kW.
inline double pv_output_pdf(double p, const BetaParams& bp) {
    detail::check_beta(bp, "pv_output_pdf");
    if (p < 0.0 || p > bp.p_max_kw) return 0.0;
    const double x = p / bp.p_max_kw;
    const double lb = detail::log_beta(bp.lambda1, bp.lambda2);
    if (x == 0.0 || x == 1.0)
        return std::pow(x, bp.lambda1 - 1.0) * std::pow(1.0 - x, bp.lambda2 - 1.0) *
               std::exp(-lb) / bp.p_max_kw;
    return std::exp((bp.lambda1 - 1.0) * std::log(x) + (bp.lambda2 - 1.0) * std::log1p(-x) - lb) /
           bp.p_max_kw;
}

inline double pv_power_from_irradiance(double xi_w_per_m2, const PVPanelSpec& spec) {
    if (xi_w_per_m2 < 0.0)
        throw std::invalid_argument("pv_power_from_irradiance: irradiance must be non-negative");
    if (!(spec.eta_mppt > 0.0 && spec.eta_mppt <= 1.0) ||
        !(spec.eta_conversion > 0.0 && spec.eta_conversion <= 1.0))
        throw std::invalid_argument("pv_power_from_irradiance: efficiencies must lie in (0,1]");
    if (!(spec.area_m2 > 0.0))
        throw std::invalid_argument("pv_power_from_irradiance: panel area must be positive");
    return xi_w_per_m2 * spec.eta_mppt * spec.area_m2 * spec.eta_conversion *
           std::cos(spec.incident_angle_rad) / 1000.0;
}

struct PointMass {
    double location_kw = 0.0;
    double probability = 0.0;
};

// A mixed distribution over [0, p_max]: an optional continuous density with
// its cumulative (mass of the continuous part on [0, p]) plus point masses.
struct OutputDistribution {
    std::function<double(double)> density;
    std::function<double(double)> cumulative;
    std::vector<PointMass> atoms;
    double p_max_kw = 0.0;
};

inline OutputDistribution wt_output_distribution(const WTCurve& c, const WeibullParams& wp) {
    detail::check_curve(c, "wt_output_distribution");
    detail::check_weibull(wp, "wt_output_distribution");
    OutputDistribution d;
    d.p_max_kw = c.p_rated_kw;
    d.density = [c, wp](double p) { return wt_output_pdf(p, c, wp); };
    d.cumulative = [c, wp](double p) {
        if (p <= 0.0) return 0.0;
        if (p > c.p_rated_kw) p = c.p_rated_kw;
        const double v = c.v_cut_in_ms + (c.v_rated_ms - c.v_cut_in_ms) * p / c.p_rated_kw;
        return weibull_cdf(v, wp) - weibull_cdf(c.v_cut_in_ms, wp);
    };
    d.atoms = {PointMass{0.0, wt_zero_mass(c, wp)},
               PointMass{c.p_rated_kw, wt_rated_mass(c, wp)}};
    return d;
}

inline OutputDistribution pv_output_distribution(const BetaParams& bp) {
    detail::check_beta(bp, "pv_output_distribution");
    OutputDistribution d;
    d.p_max_kw = bp.p_max_kw;
    d.density = [bp](double p) { return pv_output_pdf(p, bp); };
    d.cumulative = [bp](double p) {
        return regularized_incomplete_beta(bp.lambda1, bp.lambda2, p / bp.p_max_kw);
    };
    return d;
}

// Degenerate output, e.g. a PV unit during dark hours.
inline OutputDistribution point_mass_at_zero() {
    OutputDistribution d;
    d.p_max_kw = 0.0;
    d.atoms = {PointMass{0.0, 1.0}};
    return d;
}

}  // namespace adnplan
