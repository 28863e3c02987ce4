// Annual-cost model: investment, operation & maintenance, grid purchase, and
// the daily fluctuating operation cost minimized by the dispatcher.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "adnplan/plan.hpp"
#include "adnplan/prob_sequence.hpp"

namespace adnplan {

inline constexpr double kDaysPerSeason = 91.0;

struct EconParams {
    double c_wd_per_kw = 1230.0;      // WT investment, $/kW
    double c_pv_per_kw = 1540.0;      // PV investment, $/kW
    double z_per_kwh = 0.015;         // DG operating cost on delivered energy
    double y_per_kw_yr = 0.015;       // DG maintenance coefficient
    double c_f = 0.0802;              // present-value coefficient, WT
    double c_g = 0.071;               // present-value coefficient, PV
    double c_e = 0.037;               // present-value coefficient, storage
    double c_st_inse_per_kw = 232.0;  // storage investment on rated power
    double c_st_inss_per_kwh = 180.0; // storage investment on capacity
    double c_st_om_per_kwh_yr = 21.0; // storage O&M on installed capacity
};

// Time-of-use price per representative hour, $/kWh.
struct Tariff {
    std::array<double, kSlots> price_per_kwh{};

    double at(int season, int hour) const { return price_per_kwh[slot_index(season, hour)]; }
    double& at(int season, int hour) { return price_per_kwh[slot_index(season, hour)]; }

    static Tariff flat(double price) {
        Tariff t;
        t.price_per_kwh.fill(price);
        return t;
    }
};

// Per-slot multipliers applied to every bus's nominal load.
struct LoadProfile {
    std::array<double, kSlots> scale{};

    double at(int season, int hour) const { return scale[slot_index(season, hour)]; }
    double& at(int season, int hour) { return scale[slot_index(season, hour)]; }

    static LoadProfile flat() {
        LoadProfile p;
        p.scale.fill(1.0);
        return p;
    }
};

struct CostBreakdown {
    double c1 = 0.0;  // annual investment
    double c2 = 0.0;  // annual operation & maintenance
    double c3 = 0.0;  // annual grid purchase
    double total = 0.0;
};

using SeasonHourTable = std::array<std::array<double, kHoursPerDay>, kSeasons>;

inline SeasonHourTable zero_table() {
    SeasonHourTable t{};
    for (auto& row : t) row.fill(0.0);
    return t;
}

inline double investment_cost(const Plan& plan, const EconParams& ep) {
    return ep.c_f * ep.c_wd_per_kw * plan.total_wt_kw() +
           ep.c_g * ep.c_pv_per_kw * plan.total_pv_kw() +
           ep.c_e * (ep.c_st_inse_per_kw * plan.total_storage_kw() +
                     ep.c_st_inss_per_kwh * plan.total_storage_kwh());
}

inline double om_cost(const Plan& plan, const std::vector<HourlyExpectation>& profiles,
                      const EconParams& ep) {
    if (profiles.size() != static_cast<std::size_t>(kSlots))
        throw std::invalid_argument("om_cost: expected 96 hourly expectations");
    const double s_wd = plan.total_wt_kw();
    const double s_pv = plan.total_pv_kw();
    double dg_energy = 0.0;
    for (const HourlyExpectation& e : profiles)
        dg_energy += kDaysPerSeason * (s_wd * e.e_wt_per_kw + s_pv * e.e_pv_per_kw);
    return (ep.c_wd_per_kw * s_wd + ep.c_pv_per_kw * s_pv) * ep.y_per_kw_yr +
           ep.z_per_kwh * dg_energy + ep.c_st_om_per_kwh_yr * plan.total_storage_kwh();
}

// Annual energy purchase from the upstream grid. Hourly exports (negative
// purchases) are credited at the same price unless clamp_export is set.
inline double purchase_cost(const Plan& plan, const std::vector<HourlyExpectation>& profiles,
                            const SeasonHourTable& pe_signed_kw, const SeasonHourTable& losses_kw,
                            const std::array<double, kSlots>& load_kw, const Tariff& tariff,
                            bool clamp_export = false) {
    if (profiles.size() != static_cast<std::size_t>(kSlots))
        throw std::invalid_argument("purchase_cost: expected 96 hourly expectations");
    const double s_wd = plan.total_wt_kw();
    const double s_pv = plan.total_pv_kw();
    double total = 0.0;
    for (int s = 1; s <= kSeasons; ++s) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const int idx = slot_index(s, h);
            const HourlyExpectation& e = profiles[idx];
            double purchase = load_kw[idx] - s_wd * e.e_wt_per_kw - s_pv * e.e_pv_per_kw +
                              losses_kw[s - 1][h] + pe_signed_kw[s - 1][h];
            if (clamp_export && purchase < 0.0) purchase = 0.0;
            total += kDaysPerSeason * tariff.at(s, h) * purchase;
        }
    }
    return total;
}

inline CostBreakdown annual_cost(const Plan& plan, const std::vector<HourlyExpectation>& profiles,
                                 const SeasonHourTable& pe_signed_kw,
                                 const SeasonHourTable& losses_kw,
                                 const std::array<double, kSlots>& load_kw, const Tariff& tariff,
                                 const EconParams& ep, bool clamp_export = false) {
    CostBreakdown cb;
    cb.c1 = investment_cost(plan, ep);
    cb.c2 = om_cost(plan, profiles, ep);
    cb.c3 = purchase_cost(plan, profiles, pe_signed_kw, losses_kw, load_kw, tariff, clamp_export);
    cb.total = cb.c1 + cb.c2 + cb.c3;
    return cb;
}

// Daily fluctuating operation cost of one season: the tariff-weighted sum of
// hourly losses and signed storage power (charge positive).
inline double fluctuating_cost(const std::array<double, kHoursPerDay>& pe_signed_kw,
                               const std::array<double, kHoursPerDay>& losses_kw,
                               const Tariff& tariff, int season) {
    double total = 0.0;
    for (int h = 0; h < kHoursPerDay; ++h)
        total += tariff.at(season, h) * (losses_kw[h] + pe_signed_kw[h]);
    return total;
}

}  // namespace adnplan
