// Small networks, tariffs, and profiles shared by the unit and acceptance
// suites.
#pragma once

#include <array>
#include <vector>

#include "adnplan/economics.hpp"
#include "adnplan/planner.hpp"
#include "adnplan/prob_sequence.hpp"
#include "adnplan/radial_grid.hpp"

namespace testsupport {

inline adnplan::RadialNetwork two_bus_network(double load_kw = 200.0, double load_kvar = 120.0,
                                              double r_ohm = 3.2, double x_ohm = 6.4) {
    adnplan::RadialNetwork net;
    net.buses = {{1, 0.0, 0.0}, {2, load_kw, load_kvar}};
    net.branches = {{1, 2, r_ohm, x_ohm}};
    net.slack_bus = 1;
    net.v_base_kv = 12.66;
    net.s_base_kva = 1000.0;
    return net;
}

inline adnplan::RadialNetwork five_bus_network() {
    adnplan::RadialNetwork net;
    net.buses = {{1, 0.0, 0.0}, {2, 100.0, 60.0}, {3, 150.0, 90.0}, {4, 120.0, 70.0},
                 {5, 130.0, 80.0}};
    net.branches = {{1, 2, 1.6, 3.2}, {2, 3, 2.4, 4.0}, {2, 4, 2.0, 3.6}, {4, 5, 2.4, 4.0}};
    net.slack_bus = 1;
    net.v_base_kv = 12.66;
    net.s_base_kva = 1000.0;
    return net;
}

// Hourly expectations with a constant WT level and a daylight PV bell.
inline std::vector<adnplan::HourlyExpectation> synthetic_profiles(double e_wt = 0.4,
                                                                  double e_pv_peak = 0.6) {
    std::vector<adnplan::HourlyExpectation> profiles(adnplan::kSlots);
    for (int s = 1; s <= adnplan::kSeasons; ++s) {
        for (int h = 0; h < adnplan::kHoursPerDay; ++h) {
            adnplan::HourlyExpectation e;
            e.season = s;
            e.hour = h;
            e.e_wt_per_kw = e_wt;
            e.e_pv_per_kw = (h >= 8 && h <= 16) ? e_pv_peak * (1.0 - std::abs(h - 12) / 5.0) : 0.0;
            profiles[adnplan::slot_index(s, h)] = e;
        }
    }
    return profiles;
}

// Three price tiers, identical across seasons: valley 0-7, peak 18-23.
inline adnplan::Tariff three_tier_tariff(double valley = 0.02, double flat = 0.05,
                                         double peak = 0.12) {
    adnplan::Tariff t;
    for (int s = 1; s <= adnplan::kSeasons; ++s)
        for (int h = 0; h < adnplan::kHoursPerDay; ++h)
            t.at(s, h) = h <= 7 ? valley : (h >= 18 ? peak : flat);
    return t;
}

inline adnplan::StorageUnit small_storage(double capacity_kwh = 100.0, double rating_kw = 25.0) {
    adnplan::StorageUnit u;
    u.bus = 2;
    u.energy_capacity_kwh = capacity_kwh;
    u.power_rating_kw = rating_kw;
    return u;
}

// Enumerable planning instance: two candidate sites on the five-bus feeder,
// six genome bits, lossless-efficiency storage so the dispatch lattice is
// exactly reachable.
inline adnplan::PlannerProblem tiny_problem() {
    adnplan::PlannerProblem p;
    p.net = five_bus_network();
    p.profiles = synthetic_profiles(0.45, 0.0);
    p.tariff = three_tier_tariff(0.02, 0.06, 0.16);
    p.econ.c_wd_per_kw = 800.0;
    p.econ.c_pv_per_kw = 1400.0;
    p.econ.c_f = 0.08;
    p.econ.c_g = 0.08;
    p.econ.z_per_kwh = 0.01;
    p.econ.y_per_kw_yr = 0.01;
    p.econ.c_st_inse_per_kw = 100.0;
    p.econ.c_st_inss_per_kwh = 60.0;
    p.econ.c_st_om_per_kwh_yr = 4.0;
    p.econ.c_e = 0.05;
    p.caps.dg_fraction = 0.5;      // 250 kW of the 500 kW load
    p.caps.storage_fraction = 0.3; // 150 kWh
    p.sites = {{3, true, false, true}, {5, true, false, false}};
    p.encoding.dg_bits = 2;
    p.encoding.dg_unit_kw = 100.0;
    p.encoding.storage_energy_bits = 2;
    p.encoding.storage_energy_unit_kwh = 50.0;
    p.encoding.storage_power_bits = 0;  // rating from the capacity ratio
    p.dispatch.storage.eta_ch = 1.0;
    p.dispatch.storage.eta_dc = 1.0;
    p.dispatch.storage.soc_min_frac = 0.0;
    p.dispatch.storage.soc_max_frac = 1.0;
    p.dispatch.storage.soc_init_frac = 0.5;
    p.dispatch.storage.power_ratio_per_hour = 0.25;
    p.dispatch.bits_per_hour = 2;
    p.dispatch.swarm = {24, 60};
    p.upper = {14, 25};
    p.seed = 42;
    p.scenario_label = "tiny";
    return p;
}

}  // namespace testsupport
