// Scenario orchestration on top of the planner: device-type restrictions,
// storage-penetration sweeps, retained hourly voltages, voltage CDFs, and the
// comparison/report CSV writers.
#pragma once

#include <algorithm>
#include <array>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnplan/config.hpp"
#include "adnplan/dispatch.hpp"
#include "adnplan/planner.hpp"

namespace adnplan {

// Scenario 1 is the no-device baseline under the flat reference price;
// scenarios 2-4 restrict the allowed device mix (all, WT+storage, PV+storage).
inline PlannerProblem problem_for_scenario(const RunConfig& cfg, int scenario) {
    PlannerProblem p = cfg.problem;
    p.scenario_label = "scenario" + std::to_string(scenario);
    switch (scenario) {
        case 1:
            p.tariff = Tariff::flat(cfg.scenario1_flat_price_per_kwh);
            p.sites.clear();
            break;
        case 2:
            break;
        case 3:
            for (CandidateSite& s : p.sites) s.allow_pv = false;
            break;
        case 4:
            for (CandidateSite& s : p.sites) s.allow_wt = false;
            break;
        default:
            throw std::invalid_argument("problem_for_scenario: scenario must be 1..4");
    }
    return p;
}

struct ScenarioResult {
    int scenario = 0;
    PlanningReport report;
    // retained power-flow voltages: [slot][bus in network order]
    std::vector<std::vector<double>> hourly_voltages;
    std::string error;  // non-empty when this scenario failed

    bool ok() const { return error.empty(); }
};

// Injections of one representative hour for a finished plan: expected DG
// output at the configured power factor, the load-profile correction, and the
// dispatched storage exchange.
inline std::vector<Injection> slot_injections(const Plan& plan, const RadialNetwork& net,
                                              const std::vector<HourlyExpectation>& profiles,
                                              const LoadProfile& loads,
                                              const DispatchResult& dispatch, int season,
                                              int hour, double dg_power_factor = 1.0) {
    std::vector<Injection> inj(net.buses.size());
    const double scale = loads.at(season, hour);
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        inj[i].p_kw = -(scale - 1.0) * net.buses[i].p_load_kw;
        inj[i].q_kvar = -(scale - 1.0) * net.buses[i].q_load_kvar;
    }
    const HourlyExpectation& e = profiles[slot_index(season, hour)];
    const double tan_phi = dg_tan_phi(dg_power_factor);
    for (const SiteAllocation& site : plan.sites) {
        const double dg_kw = site.wt_kw * e.e_wt_per_kw + site.pv_kw * e.e_pv_per_kw;
        inj[net.index_of(site.bus)].p_kw += dg_kw;
        inj[net.index_of(site.bus)].q_kvar += dg_kw * tan_phi;
    }
    for (std::size_t u = 0; u < dispatch.units.size(); ++u)
        inj[net.index_of(dispatch.units[u].bus)].p_kw -=
            dispatch.unit_levels[u][season - 1][hour];
    return inj;
}

inline std::vector<std::vector<double>> retained_voltages(const PlannerProblem& p,
                                                          const PlanningReport& report) {
    std::vector<std::vector<double>> volts(kSlots);
    for (int s = 1; s <= kSeasons; ++s)
        for (int h = 0; h < kHoursPerDay; ++h) {
            const auto inj = slot_injections(report.best_plan, p.net, p.profiles, p.loads,
                                             report.dispatch, s, h, p.dispatch.dg_power_factor);
            volts[slot_index(s, h)] = solve_power_flow(p.net, inj, p.dispatch.pf).v_mag_pu;
        }
    return volts;
}

inline ScenarioResult run_scenario(const RunConfig& cfg, int scenario) {
    ScenarioResult result;
    result.scenario = scenario;
    try {
        const PlannerProblem p = problem_for_scenario(cfg, scenario);
        result.report = plan(p);
        result.hourly_voltages = retained_voltages(p, result.report);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

// Failures stay confined to their scenario; the others still run and emit.
inline std::vector<ScenarioResult> run_scenarios(const RunConfig& cfg, std::span<const int> list) {
    std::vector<ScenarioResult> out;
    for (int scenario : list) out.push_back(run_scenario(cfg, scenario));
    return out;
}

struct SweepRow {
    double cap_fraction = 0.0;
    Plan plan;
    CostBreakdown cost;
    bool feasible = true;
};

// One full planning run per storage-penetration cap.
inline std::vector<SweepRow> sweep_storage_penetration(const RunConfig& cfg,
                                                       std::span<const double> caps) {
    std::vector<SweepRow> rows;
    for (double cap : caps) {
        PlannerProblem p = problem_for_scenario(cfg, 2);
        p.caps.storage_fraction = cap;
        p.scenario_label = "sweep cap=" + csv::format_sig(cap);
        const PlanningReport report = plan(p);
        rows.push_back({cap, report.best_plan, report.cost, report.feasible});
    }
    return rows;
}

struct CdfPoint {
    double voltage_pu = 0.0;
    double cum_prob = 0.0;
};

// Empirical CDF of one bus's voltage over the 96 representative hours; every
// season carries the same 91-day weight, so the slots weigh equally.
inline std::vector<CdfPoint> voltage_cdf(const ScenarioResult& result, int bus_id,
                                         const RadialNetwork& net) {
    if (!result.ok()) throw std::invalid_argument("voltage_cdf: scenario failed: " + result.error);
    const std::size_t idx = net.index_of(bus_id);
    std::vector<double> samples;
    samples.reserve(result.hourly_voltages.size());
    for (const auto& v : result.hourly_voltages) samples.push_back(v[idx]);
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> cdf(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        cdf[i] = {samples[i], static_cast<double>(i + 1) / static_cast<double>(samples.size())};
    return cdf;
}

// Bus whose voltage dips lowest across all retained hours.
inline int min_voltage_bus(const ScenarioResult& result, const RadialNetwork& net) {
    if (!result.ok())
        throw std::invalid_argument("min_voltage_bus: scenario failed: " + result.error);
    double worst = 1e9;
    int bus = net.slack_bus;
    for (const auto& slot : result.hourly_voltages)
        for (std::size_t i = 0; i < slot.size(); ++i)
            if (slot[i] < worst) {
                worst = slot[i];
                bus = net.buses[i].id;
            }
    return bus;
}

// One row per installed device: the device tag carries the unit.
inline void write_allocation_csv(std::ostream& out, std::span<const ScenarioResult> results) {
    out << "scenario,bus,device,capacity\n";
    for (const ScenarioResult& r : results) {
        if (!r.ok()) continue;
        for (const SiteAllocation& site : r.report.best_plan.sites) {
            const std::pair<const char*, double> devices[] = {{"wt_kw", site.wt_kw},
                                                              {"pv_kw", site.pv_kw},
                                                              {"storage_kwh", site.storage_kwh},
                                                              {"storage_kw", site.storage_kw}};
            for (const auto& [device, capacity] : devices)
                if (capacity > 0.0)
                    out << r.scenario << ',' << site.bus << ',' << device << ','
                        << csv::format_sig(capacity) << '\n';
        }
    }
}

inline void write_cost_csv(std::ostream& out, std::span<const ScenarioResult> results) {
    out << "scenario,c1,c2,c3,total\n";
    for (const ScenarioResult& r : results) {
        if (!r.ok()) continue;
        out << r.scenario << ',' << csv::format_sig(r.report.cost.c1) << ','
            << csv::format_sig(r.report.cost.c2) << ',' << csv::format_sig(r.report.cost.c3) << ','
            << csv::format_sig(r.report.cost.total) << '\n';
    }
}

inline void write_dispatch_csv(std::ostream& out, const PlanningReport& report) {
    out << "season,hour,wt_kw,pv_kw,storage_kw_signed,loss_kw\n";
    for (int s = 1; s <= kSeasons; ++s)
        for (int h = 0; h < kHoursPerDay; ++h)
            out << s << ',' << h << ',' << csv::format_sig(report.dispatch.wt_kw[s - 1][h]) << ','
                << csv::format_sig(report.dispatch.pv_kw[s - 1][h]) << ','
                << csv::format_sig(report.dispatch.total_levels[s - 1][h]) << ','
                << csv::format_sig(report.dispatch.loss_kw[s - 1][h]) << '\n';
}

inline void write_cdf_csv(std::ostream& out, std::span<const CdfPoint> cdf) {
    out << "voltage_pu,cum_prob\n";
    for (const CdfPoint& p : cdf)
        out << csv::format_sig(p.voltage_pu) << ',' << csv::format_sig(p.cum_prob) << '\n';
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "cap_fraction,storage_kwh_total,c1,c2,c3,total\n";
    for (const SweepRow& r : rows)
        out << csv::format_sig(r.cap_fraction) << ',' << csv::format_sig(r.plan.total_storage_kwh())
            << ',' << csv::format_sig(r.cost.c1) << ',' << csv::format_sig(r.cost.c2) << ','
            << csv::format_sig(r.cost.c3) << ',' << csv::format_sig(r.cost.total) << '\n';
}

}  // namespace adnplan
