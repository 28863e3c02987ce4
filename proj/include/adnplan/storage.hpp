// Battery storage model: state-of-charge dynamics and schedule validation.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace adnplan {

inline constexpr double kSocMatchToleranceKwh = 1e-6;

struct StorageUnit {
    int bus = 0;
    double energy_capacity_kwh = 0.0;
    double power_rating_kw = 0.0;
    double soc_min_frac = 0.1;
    double soc_max_frac = 0.9;
    double eta_ch = 0.9;
    double eta_dc = 0.9;
    double soc_init_frac = 0.5;

    void validate() const {
        if (energy_capacity_kwh < 0.0 || power_rating_kw < 0.0)
            throw std::invalid_argument("StorageUnit: capacity and rating must be non-negative");
        if (!(0.0 <= soc_min_frac && soc_min_frac < soc_max_frac && soc_max_frac <= 1.0))
            throw std::invalid_argument("StorageUnit: require 0 <= soc_min < soc_max <= 1");
        if (!(eta_ch > 0.0 && eta_ch <= 1.0 && eta_dc > 0.0 && eta_dc <= 1.0))
            throw std::invalid_argument("StorageUnit: efficiencies must lie in (0,1]");
        if (!(soc_init_frac >= soc_min_frac && soc_init_frac <= soc_max_frac))
            throw std::invalid_argument("StorageUnit: initial SOC outside the allowed band");
        if (power_rating_kw > energy_capacity_kwh + 1e-9)
            throw std::invalid_argument("StorageUnit: hourly rating exceeds energy capacity");
    }
};

// Signed hourly power levels of one day: charging positive, discharging
// negative.
using DayLevels = std::array<double, 24>;

// SOC in kWh for hour boundaries 0..24, stepping with the charge and
// discharge efficiencies at a one-hour resolution.
inline std::array<double, 25> soc_trajectory(const DayLevels& levels, const StorageUnit& unit) {
    unit.validate();
    std::array<double, 25> soc{};
    soc[0] = unit.soc_init_frac * unit.energy_capacity_kwh;
    for (int h = 0; h < 24; ++h) {
        const double p_ch = std::max(levels[h], 0.0);
        const double p_dc = std::max(-levels[h], 0.0);
        soc[h + 1] = soc[h] + unit.eta_ch * p_ch - p_dc / unit.eta_dc;
    }
    return soc;
}

struct ScheduleViolation {
    enum class Kind { PowerLimit, SocLow, SocHigh, EndOfDayMismatch };
    Kind kind = Kind::PowerLimit;
    int hour = 0;  // -1 for the end-of-day check
    double amount = 0.0;
};

inline std::vector<ScheduleViolation> validate_schedule(const DayLevels& levels,
                                                        const StorageUnit& unit) {
    std::vector<ScheduleViolation> out;
    for (int h = 0; h < 24; ++h) {
        const double excess = std::fabs(levels[h]) - unit.power_rating_kw;
        if (excess > 1e-9)
            out.push_back({ScheduleViolation::Kind::PowerLimit, h, excess});
    }
    const auto soc = soc_trajectory(levels, unit);
    const double lo = unit.soc_min_frac * unit.energy_capacity_kwh;
    const double hi = unit.soc_max_frac * unit.energy_capacity_kwh;
    for (int h = 1; h <= 24; ++h) {
        if (soc[h] < lo - 1e-9)
            out.push_back({ScheduleViolation::Kind::SocLow, h - 1, lo - soc[h]});
        else if (soc[h] > hi + 1e-9)
            out.push_back({ScheduleViolation::Kind::SocHigh, h - 1, soc[h] - hi});
    }
    const double mismatch = std::fabs(soc[24] - soc[0]);
    if (mismatch > kSocMatchToleranceKwh)
        out.push_back({ScheduleViolation::Kind::EndOfDayMismatch, -1, mismatch});
    return out;
}

}  // namespace adnplan
