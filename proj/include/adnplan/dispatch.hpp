// Lower-level model: per-season 24-hour storage dispatch minimizing the
// tariff-weighted sum of network losses and storage exchange, subject to the
// storage power, SOC-band, and end-of-day constraints.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <stdexcept>
#include <vector>

#include "adnplan/economics.hpp"
#include "adnplan/ibpso.hpp"
#include "adnplan/plan.hpp"
#include "adnplan/prob_sequence.hpp"
#include "adnplan/radial_grid.hpp"
#include "adnplan/storage.hpp"

namespace adnplan {

struct StorageDefaults {
    double eta_ch = 0.9;
    double eta_dc = 0.9;
    double soc_min_frac = 0.1;
    double soc_max_frac = 0.9;
    double soc_init_frac = 0.5;
    double power_ratio_per_hour = 0.25;  // rating as a fraction of capacity
};

struct DispatchOptions {
    SwarmConfig swarm{20, 50};
    int bits_per_hour = 3;  // maps to 2^b - 1 signed levels per hour
    StorageDefaults storage;
    PowerFlowOptions pf;
    double dg_power_factor = 1.0;  // constant DG power factor, unity default
    std::uint64_t seed = 1;
};

// Reactive output per unit of active output at a constant power factor.
inline double dg_tan_phi(double power_factor) {
    if (!(power_factor > 0.0 && power_factor <= 1.0))
        throw std::invalid_argument("dg_tan_phi: power factor must lie in (0,1]");
    return std::sqrt(1.0 - power_factor * power_factor) / power_factor;
}

// Storage units implied by a plan; sites without both a positive capacity and
// a positive rating contribute none. Ratings above the hourly energy bound
// are clamped to it.
inline std::vector<StorageUnit> storage_units_from_plan(const Plan& plan,
                                                        const StorageDefaults& d) {
    std::vector<StorageUnit> units;
    for (const SiteAllocation& site : plan.sites) {
        if (site.storage_kwh <= 0.0) continue;
        StorageUnit u;
        u.bus = site.bus;
        u.energy_capacity_kwh = site.storage_kwh;
        u.power_rating_kw =
            site.storage_kw > 0.0 ? site.storage_kw : d.power_ratio_per_hour * site.storage_kwh;
        u.power_rating_kw = std::min(u.power_rating_kw, u.energy_capacity_kwh);
        u.soc_min_frac = d.soc_min_frac;
        u.soc_max_frac = d.soc_max_frac;
        u.soc_init_frac = d.soc_init_frac;
        u.eta_ch = d.eta_ch;
        u.eta_dc = d.eta_dc;
        if (u.power_rating_kw <= 0.0) continue;
        u.validate();
        units.push_back(u);
    }
    return units;
}

struct DispatchResult {
    std::vector<StorageUnit> units;
    // [unit][season][hour], signed kW with charging positive
    std::vector<std::array<std::array<double, kHoursPerDay>, kSeasons>> unit_levels;
    SeasonHourTable total_levels = zero_table();
    SeasonHourTable loss_kw = zero_table();
    SeasonHourTable wt_kw = zero_table();
    SeasonHourTable pv_kw = zero_table();
    std::array<double, kSeasons> f2_per_season{};
    std::array<double, kSeasons> limit_violation_norm{};
    bool feasible = true;
};

namespace detail {

inline int levels_per_hour(int bits) { return (1 << bits) - 1; }

inline double level_value(int idx, int n_levels, double rating) {
    if (n_levels <= 1) return 0.0;
    return -rating + static_cast<double>(idx) * (2.0 * rating / (n_levels - 1));
}

inline int zero_level_index(int n_levels) { return (n_levels - 1) / 2; }

// Clamp each hour against the SOC band, then trim the latest charge or
// discharge hours until the day ends on its initial SOC. Magnitudes only ever
// shrink, so the all-idle schedule is a fixed point.
inline bool repair_day(DayLevels& levels, const StorageUnit& unit) {
    const double lo = unit.soc_min_frac * unit.energy_capacity_kwh;
    const double hi = unit.soc_max_frac * unit.energy_capacity_kwh;
    const double tol = 0.5 * kSocMatchToleranceKwh;
    for (int pass = 0; pass < 100; ++pass) {
        double soc = unit.soc_init_frac * unit.energy_capacity_kwh;
        for (int h = 0; h < kHoursPerDay; ++h) {
            double lv = std::clamp(levels[h], -unit.power_rating_kw, unit.power_rating_kw);
            if (lv > 0.0) lv = std::min(lv, (hi - soc) / unit.eta_ch);
            if (lv < 0.0) lv = -std::min(-lv, (soc - lo) * unit.eta_dc);
            levels[h] = lv;
            soc += unit.eta_ch * std::max(lv, 0.0) - std::max(-lv, 0.0) / unit.eta_dc;
        }
        double delta = soc - unit.soc_init_frac * unit.energy_capacity_kwh;
        if (std::fabs(delta) <= tol) return true;
        if (delta > 0.0) {
            for (int h = kHoursPerDay - 1; h >= 0 && delta > tol; --h) {
                if (levels[h] <= 0.0) continue;
                const double red = std::min(levels[h], delta / unit.eta_ch);
                levels[h] -= red;
                delta -= red * unit.eta_ch;
            }
        } else {
            for (int h = kHoursPerDay - 1; h >= 0 && delta < -tol; --h) {
                if (levels[h] >= 0.0) continue;
                const double red = std::min(-levels[h], -delta * unit.eta_dc);
                levels[h] += red;
                delta += red / unit.eta_dc;
            }
        }
    }
    return validate_schedule(levels, unit).empty();
}

}  // namespace detail

// Optimizes the four seasonal days independently for the plan's storage
// fleet. DG outputs enter as hourly expectations scaled by the plan's
// capacities; loads are the network's nominal loads scaled per slot.
inline DispatchResult optimize_dispatch(const Plan& plan, const RadialNetwork& net,
                                        const std::vector<HourlyExpectation>& profiles,
                                        const LoadProfile& loads, const Tariff& tariff,
                                        const DispatchOptions& opt = {}) {
    if (profiles.size() != static_cast<std::size_t>(kSlots))
        throw std::invalid_argument("optimize_dispatch: expected 96 hourly expectations");
    if (opt.bits_per_hour < 2 || opt.bits_per_hour > 10)
        throw std::invalid_argument("optimize_dispatch: bits_per_hour must lie in [2,10]");
    net.validate();

    DispatchResult result;
    result.units = storage_units_from_plan(plan, opt.storage);
    result.unit_levels.assign(result.units.size(), {});
    for (auto& per_season : result.unit_levels)
        for (auto& day : per_season) day.fill(0.0);

    const std::size_t n_bus = net.buses.size();
    std::vector<std::size_t> site_index(plan.sites.size());
    for (std::size_t i = 0; i < plan.sites.size(); ++i)
        site_index[i] = net.index_of(plan.sites[i].bus);
    std::vector<std::size_t> unit_index(result.units.size());
    for (std::size_t u = 0; u < result.units.size(); ++u)
        unit_index[u] = net.index_of(result.units[u].bus);

    const int n_levels = detail::levels_per_hour(opt.bits_per_hour);
    const int bits = opt.bits_per_hour;
    const double tan_phi = dg_tan_phi(opt.dg_power_factor);

    for (int season = 1; season <= kSeasons; ++season) {
        // hourly injections before storage: DG expectations plus the load
        // scaling correction (solver demand = nominal load - injection)
        std::array<std::vector<Injection>, kHoursPerDay> hour_inj;
        double max_price = 0.0;
        for (int h = 0; h < kHoursPerDay; ++h) {
            max_price = std::max(max_price, tariff.at(season, h));
            hour_inj[h].assign(n_bus, Injection{});
            const HourlyExpectation& e = profiles[slot_index(season, h)];
            const double scale = loads.at(season, h);
            for (std::size_t i = 0; i < n_bus; ++i) {
                hour_inj[h][i].p_kw = -(scale - 1.0) * net.buses[i].p_load_kw;
                hour_inj[h][i].q_kvar = -(scale - 1.0) * net.buses[i].q_load_kvar;
            }
            for (std::size_t i = 0; i < plan.sites.size(); ++i) {
                const SiteAllocation& site = plan.sites[i];
                const double dg_kw = site.wt_kw * e.e_wt_per_kw + site.pv_kw * e.e_pv_per_kw;
                hour_inj[h][site_index[i]].p_kw += dg_kw;
                hour_inj[h][site_index[i]].q_kvar += dg_kw * tan_phi;
                result.wt_kw[season - 1][h] += site.wt_kw * e.e_wt_per_kw;
                result.pv_kw[season - 1][h] += site.pv_kw * e.e_pv_per_kw;
            }
        }

        auto solve_hour = [&](int h, const std::vector<double>& unit_kw) {
            std::vector<Injection> inj = hour_inj[h];
            for (std::size_t u = 0; u < result.units.size(); ++u)
                inj[unit_index[u]].p_kw -= unit_kw[u];
            return solve_power_flow(net, inj, opt.pf);
        };

        std::array<double, kHoursPerDay> losses{};
        if (result.units.empty()) {
            std::array<double, kHoursPerDay> zero_levels{};
            for (int h = 0; h < kHoursPerDay; ++h) {
                const PowerFlowResult pf = solve_hour(h, {});
                losses[h] = pf.p_loss_kw;
                for (const LimitViolation& v : check_limits(pf, net))
                    result.limit_violation_norm[season - 1] += v.kind == LimitViolation::Kind::UnderVoltage
                                                                   ? (v.limit - v.value) / v.limit
                                                                   : (v.value - v.limit) / v.limit;
            }
            result.loss_kw[season - 1] = losses;
            result.f2_per_season[season - 1] =
                fluctuating_cost(zero_levels, losses, tariff, season);
            continue;
        }

        double total_rating = 0.0;
        for (const StorageUnit& u : result.units) total_rating += u.power_rating_kw;
        const double penalty_weight = 10.0 * max_price * total_rating * kHoursPerDay;

        // loss lookup keyed by the hour and the exact repaired levels; the
        // swarm revisits few distinct combinations
        std::map<std::uint64_t, double> loss_cache;
        auto cached_loss = [&](int h, const std::vector<double>& unit_kw) {
            std::uint64_t key = static_cast<std::uint64_t>(h);
            for (double kw : unit_kw) {
                std::uint64_t raw;
                static_assert(sizeof(raw) == sizeof(kw));
                std::memcpy(&raw, &kw, sizeof(raw));
                key = detail::mix64(key ^ raw);
            }
            const auto it = loss_cache.find(key);
            if (it != loss_cache.end()) return it->second;
            const double loss = solve_hour(h, unit_kw).p_loss_kw;
            loss_cache.emplace(key, loss);
            return loss;
        };

        const std::size_t n_bits = result.units.size() * kHoursPerDay * bits;
        std::vector<double> unit_kw(result.units.size());

        auto decode_day = [&](const BitVector& genome, std::size_t u) {
            DayLevels day{};
            for (int h = 0; h < kHoursPerDay; ++h) {
                int code = 0;
                const std::size_t base = (u * kHoursPerDay + h) * bits;
                for (int b = 0; b < bits; ++b) code = (code << 1) | genome[base + b];
                day[h] = detail::level_value(std::min(code, n_levels - 1), n_levels,
                                             result.units[u].power_rating_kw);
            }
            return day;
        };

        // candidates are repaired into feasible schedules before costing, so
        // the search moves over feasible dispatch only; a candidate the repair
        // cannot fix keeps a quadratic end-of-day penalty
        auto fitness = [&](const BitVector& genome) {
            double f2 = 0.0;
            double penalty = 0.0;
            std::vector<DayLevels> day(result.units.size());
            for (std::size_t u = 0; u < result.units.size(); ++u) {
                day[u] = decode_day(genome, u);
                if (!detail::repair_day(day[u], result.units[u])) {
                    const StorageUnit& unit = result.units[u];
                    const auto soc = soc_trajectory(day[u], unit);
                    const double mismatch =
                        (soc[kHoursPerDay] - soc[0]) / unit.energy_capacity_kwh;
                    penalty += penalty_weight * (1.0 + mismatch * mismatch);
                }
            }
            for (int h = 0; h < kHoursPerDay; ++h) {
                double pe = 0.0;
                for (std::size_t u = 0; u < result.units.size(); ++u) {
                    unit_kw[u] = day[u][h];
                    pe += day[u][h];
                }
                f2 += tariff.at(season, h) * (cached_loss(h, unit_kw) + pe);
            }
            return f2 + penalty;
        };

        auto encode_level = [&](BitVector& genome, std::size_t u, int h, int idx) {
            const std::size_t base = (u * kHoursPerDay + h) * bits;
            for (int b = 0; b < bits; ++b) genome[base + b] = (idx >> (bits - 1 - b)) & 1;
        };

        // two anchors: the all-idle schedule, and a price-greedy one that
        // charges through the cheapest third of the day and discharges
        // through the priciest third, respecting the SOC band in time order
        BitVector idle(n_bits, 0), greedy(n_bits, 0);
        const int zero_code = detail::zero_level_index(n_levels);
        std::array<int, kHoursPerDay> price_rank{};
        {
            std::array<int, kHoursPerDay> order{};
            for (int h = 0; h < kHoursPerDay; ++h) order[h] = h;
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return tariff.at(season, a) < tariff.at(season, b);
            });
            for (int pos = 0; pos < kHoursPerDay; ++pos) price_rank[order[pos]] = pos;
        }
        for (std::size_t u = 0; u < result.units.size(); ++u) {
            const StorageUnit& unit = result.units[u];
            const double lo = unit.soc_min_frac * unit.energy_capacity_kwh;
            const double hi = unit.soc_max_frac * unit.energy_capacity_kwh;
            double soc = unit.soc_init_frac * unit.energy_capacity_kwh;
            for (int h = 0; h < kHoursPerDay; ++h) {
                encode_level(idle, u, h, zero_code);
                double level = 0.0;
                if (price_rank[h] < kHoursPerDay / 3)
                    level = std::min(unit.power_rating_kw, (hi - soc) / unit.eta_ch);
                else if (price_rank[h] >= 2 * kHoursPerDay / 3)
                    level = -std::min(unit.power_rating_kw, (soc - lo) * unit.eta_dc);
                soc += unit.eta_ch * std::max(level, 0.0) - std::max(-level, 0.0) / unit.eta_dc;
                const int idx = static_cast<int>(std::clamp<long>(
                    std::lround((level + unit.power_rating_kw) * (n_levels - 1) /
                                (2.0 * unit.power_rating_kw)),
                    0, n_levels - 1));
                encode_level(greedy, u, h, idx);
            }
        }

        SwarmConfig swarm = opt.swarm;
        swarm.seed = stream_seed(opt.seed, 0xD15Cu, static_cast<std::uint64_t>(season));
        const std::array<BitVector, 2> warm{idle, greedy};
        const RunResult best = run(fitness, n_bits, swarm, warm);

        bool season_feasible = true;
        std::vector<double> final_kw(result.units.size());
        for (std::size_t u = 0; u < result.units.size(); ++u) {
            DayLevels day = decode_day(best.best_position, u);
            if (!detail::repair_day(day, result.units[u])) season_feasible = false;
            if (!validate_schedule(day, result.units[u]).empty()) season_feasible = false;
            result.unit_levels[u][season - 1] = day;
        }

        std::array<double, kHoursPerDay> pe_total{};
        for (int h = 0; h < kHoursPerDay; ++h) {
            for (std::size_t u = 0; u < result.units.size(); ++u) {
                final_kw[u] = result.unit_levels[u][season - 1][h];
                pe_total[h] += final_kw[u];
            }
            const PowerFlowResult pf = solve_hour(h, final_kw);
            losses[h] = pf.p_loss_kw;
            for (const LimitViolation& v : check_limits(pf, net))
                result.limit_violation_norm[season - 1] += v.kind == LimitViolation::Kind::UnderVoltage
                                                               ? (v.limit - v.value) / v.limit
                                                               : (v.value - v.limit) / v.limit;
        }
        result.total_levels[season - 1] = pe_total;
        result.loss_kw[season - 1] = losses;
        result.f2_per_season[season - 1] = fluctuating_cost(pe_total, losses, tariff, season);
        if (!season_feasible) result.feasible = false;
    }
    return result;
}

}  // namespace adnplan
