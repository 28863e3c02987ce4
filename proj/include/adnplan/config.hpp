// Run-configuration ingestion: a dotted-key plain-text config file plus the
// comma-separated tariff, weather, and load-profile inputs. Quantities carry
// unit suffixes in their key names; every defaulted value is marked in the
// echo so placeholder data is visible.
#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnplan/csv.hpp"
#include "adnplan/economics.hpp"
#include "adnplan/planner.hpp"
#include "adnplan/prob_sequence.hpp"
#include "adnplan/radial_grid.hpp"

namespace adnplan {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& problems)
        : std::runtime_error(join(problems)), issues(problems) {}
    std::vector<std::string> issues;

private:
    static std::string join(const std::vector<std::string>& problems) {
        std::ostringstream os;
        os << "configuration invalid (" << problems.size() << " issue"
           << (problems.size() == 1 ? "" : "s") << "):";
        for (const std::string& p : problems) os << "\n  - " << p;
        return os.str();
    }
};

// Tariff file rows: season,hour,price_per_kwh for all 96 slots.
inline Tariff parse_tariff_csv(const std::string& path) {
    Tariff t;
    std::vector<bool> seen(kSlots, false);
    for (const std::string& raw : csv::read_lines(path)) {
        if (csv::is_blank_or_comment(raw)) continue;
        const auto fields = csv::split(csv::trim(raw));
        if (!fields.empty() && fields[0] == "season") continue;  // header
        if (fields.size() != 3)
            throw std::invalid_argument("tariff file " + path + ": bad row '" + raw + "'");
        const int s = csv::to_int(fields[0], "tariff season");
        const int h = csv::to_int(fields[1], "tariff hour");
        const double price = csv::to_double(fields[2], "tariff price_per_kwh");
        if (price < 0.0) throw std::invalid_argument("tariff file " + path + ": negative price");
        t.at(s, h) = price;
        seen[slot_index(s, h)] = true;
    }
    for (int s = 1; s <= kSeasons; ++s)
        for (int h = 0; h < kHoursPerDay; ++h)
            if (!seen[slot_index(s, h)])
                throw IncompleteProfileError("tariff file " + path + ": missing slot (season " +
                                             std::to_string(s) + ", hour " + std::to_string(h) +
                                             ")");
    return t;
}

// Weather file rows: season,hour,wind_t,wind_gamma,pv_mu,pv_sigma2,pv_dark.
inline std::vector<SlotWeather> parse_weather_csv(const std::string& path) {
    std::vector<SlotWeather> slots;
    for (const std::string& raw : csv::read_lines(path)) {
        if (csv::is_blank_or_comment(raw)) continue;
        const auto fields = csv::split(csv::trim(raw));
        if (!fields.empty() && fields[0] == "season") continue;
        if (fields.size() != 7)
            throw std::invalid_argument("weather file " + path + ": bad row '" + raw + "'");
        SlotWeather w;
        w.season = csv::to_int(fields[0], "weather season");
        w.hour = csv::to_int(fields[1], "weather hour");
        w.wind.shape_t = csv::to_double(fields[2], "weather wind_t");
        w.wind.scale_gamma = csv::to_double(fields[3], "weather wind_gamma");
        w.pv_mu = csv::to_double(fields[4], "weather pv_mu");
        w.pv_sigma2 = csv::to_double(fields[5], "weather pv_sigma2");
        w.pv_dark = csv::to_int(fields[6], "weather pv_dark") != 0;
        slots.push_back(w);
    }
    return slots;
}

// Load-profile rows: season,hour,scale (multiplier on every bus's nominal load).
inline LoadProfile parse_load_profile_csv(const std::string& path) {
    LoadProfile p = LoadProfile::flat();
    std::vector<bool> seen(kSlots, false);
    for (const std::string& raw : csv::read_lines(path)) {
        if (csv::is_blank_or_comment(raw)) continue;
        const auto fields = csv::split(csv::trim(raw));
        if (!fields.empty() && fields[0] == "season") continue;
        if (fields.size() != 3)
            throw std::invalid_argument("load profile " + path + ": bad row '" + raw + "'");
        const int s = csv::to_int(fields[0], "load season");
        const int h = csv::to_int(fields[1], "load hour");
        const double scale = csv::to_double(fields[2], "load scale");
        if (scale < 0.0) throw std::invalid_argument("load profile " + path + ": negative scale");
        p.at(s, h) = scale;
        seen[slot_index(s, h)] = true;
    }
    for (int s = 1; s <= kSeasons; ++s)
        for (int h = 0; h < kHoursPerDay; ++h)
            if (!seen[slot_index(s, h)])
                throw IncompleteProfileError("load profile " + path + ": missing slot (season " +
                                             std::to_string(s) + ", hour " + std::to_string(h) +
                                             ")");
    return p;
}

struct RunConfig {
    PlannerProblem problem;  // all device types allowed; scenarios restrict later
    WTCurve curve;
    std::vector<SlotWeather> weather;
    int scenario = 2;
    double scenario1_flat_price_per_kwh = 0.05;
    double seq_step_per_unit = 0.01;
    Plan fixed_plan;  // for dispatch-only runs
    std::string output_dir = "out";
    std::vector<std::string> echo;
};

// Parses and validates a config file; problems are collected and reported
// together with their key paths.
inline RunConfig load_config(const std::string& path) {
    namespace fs = std::filesystem;
    std::vector<std::string> errors;
    std::map<std::string, std::string> kv;
    std::set<std::string> consumed;

    std::vector<std::string> lines;
    try {
        lines = csv::read_lines(path);
    } catch (const std::exception& e) {
        throw ConfigError({e.what()});
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (csv::is_blank_or_comment(lines[i])) continue;
        const auto eq = lines[i].find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(i + 1) + ": expected 'key = value'");
            continue;
        }
        const std::string key = csv::trim(lines[i].substr(0, eq));
        const std::string value = csv::trim(lines[i].substr(eq + 1));
        if (key.empty() || value.empty()) {
            errors.push_back("line " + std::to_string(i + 1) + ": empty key or value");
            continue;
        }
        if (kv.count(key)) errors.push_back(key + ": duplicate key");
        kv[key] = value;
    }

    RunConfig cfg;
    const fs::path base_dir = fs::path(path).parent_path();

    auto echo_value = [&cfg](const std::string& key, const std::string& value, bool defaulted) {
        cfg.echo.push_back(key + " = " + value + (defaulted ? "  (default)" : ""));
    };
    auto get_string = [&](const std::string& key, const std::string& fallback,
                          bool required) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            if (required)
                errors.push_back(key + ": required key is missing");
            else
                echo_value(key, fallback.empty() ? "<none>" : fallback, true);
            return fallback;
        }
        consumed.insert(key);
        echo_value(key, it->second, false);
        return it->second;
    };
    auto get_double = [&](const std::string& key, double fallback) -> double {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            echo_value(key, csv::format_sig(fallback), true);
            return fallback;
        }
        consumed.insert(key);
        try {
            const double v = csv::to_double(it->second, key);
            echo_value(key, it->second, false);
            return v;
        } catch (const std::exception& e) {
            errors.push_back(e.what());
            return fallback;
        }
    };
    auto get_int = [&](const std::string& key, int fallback) -> int {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            echo_value(key, std::to_string(fallback), true);
            return fallback;
        }
        consumed.insert(key);
        try {
            const int v = csv::to_int(it->second, key);
            echo_value(key, it->second, false);
            return v;
        } catch (const std::exception& e) {
            errors.push_back(e.what());
            return fallback;
        }
    };
    auto get_bool = [&](const std::string& key, bool fallback) -> bool {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            echo_value(key, fallback ? "true" : "false", true);
            return fallback;
        }
        consumed.insert(key);
        if (it->second == "true" || it->second == "1") {
            echo_value(key, it->second, false);
            return true;
        }
        if (it->second == "false" || it->second == "0") {
            echo_value(key, it->second, false);
            return false;
        }
        errors.push_back(key + ": expected true/false");
        return fallback;
    };
    auto resolve = [&base_dir](const std::string& p) {
        const fs::path candidate(p);
        return candidate.is_absolute() ? candidate.string() : (base_dir / candidate).string();
    };

    // -- files
    const std::string network_file = get_string("network.file", "", true);
    if (!network_file.empty()) {
        try {
            cfg.problem.net = load_network_csv(resolve(network_file));
        } catch (const std::exception& e) {
            errors.push_back(std::string("network.file: ") + e.what());
        }
    }
    cfg.problem.net.v_min_pu = get_double("network.v_min_pu", cfg.problem.net.v_min_pu);
    cfg.problem.net.v_max_pu = get_double("network.v_max_pu", cfg.problem.net.v_max_pu);

    const std::string tariff_file = get_string("tariff.file", "", true);
    if (!tariff_file.empty()) {
        try {
            cfg.problem.tariff = parse_tariff_csv(resolve(tariff_file));
        } catch (const std::exception& e) {
            errors.push_back(std::string("tariff.file: ") + e.what());
        }
    }

    const std::string weather_file = get_string("weather.file", "", true);
    if (!weather_file.empty()) {
        try {
            cfg.weather = parse_weather_csv(resolve(weather_file));
        } catch (const std::exception& e) {
            errors.push_back(std::string("weather.file: ") + e.what());
        }
    }

    const std::string loads_file = get_string("loads.file", "", false);
    if (!loads_file.empty()) {
        try {
            cfg.problem.loads = parse_load_profile_csv(resolve(loads_file));
        } catch (const std::exception& e) {
            errors.push_back(std::string("loads.file: ") + e.what());
        }
    } else {
        cfg.problem.loads = LoadProfile::flat();
    }

    // -- turbine curve, DG power factor, sequence step
    cfg.curve.v_cut_in_ms = get_double("wt_curve.v_cut_in_ms", 3.0);
    cfg.curve.v_rated_ms = get_double("wt_curve.v_rated_ms", 12.0);
    cfg.curve.v_cut_out_ms = get_double("wt_curve.v_cut_out_ms", 25.0);
    cfg.curve.p_rated_kw = 1.0;
    cfg.problem.dispatch.dg_power_factor = get_double("dg.power_factor", 1.0);
    if (!(cfg.problem.dispatch.dg_power_factor > 0.0 &&
          cfg.problem.dispatch.dg_power_factor <= 1.0))
        errors.push_back("dg.power_factor: must lie in (0,1]");
    cfg.seq_step_per_unit = get_double("seq.step_per_unit", 0.01);

    // -- economics
    EconParams& ep = cfg.problem.econ;
    ep.c_wd_per_kw = get_double("econ.wt.invest_per_kw", ep.c_wd_per_kw);
    ep.c_f = get_double("econ.wt.present_value_coeff", ep.c_f);
    ep.c_pv_per_kw = get_double("econ.pv.invest_per_kw", ep.c_pv_per_kw);
    ep.c_g = get_double("econ.pv.present_value_coeff", ep.c_g);
    ep.z_per_kwh = get_double("econ.dg.operating_per_kwh", ep.z_per_kwh);
    ep.y_per_kw_yr = get_double("econ.dg.maintenance_per_kw_yr", ep.y_per_kw_yr);
    ep.c_st_inse_per_kw = get_double("econ.storage.invest_per_kw", ep.c_st_inse_per_kw);
    ep.c_st_inss_per_kwh = get_double("econ.storage.invest_per_kwh", ep.c_st_inss_per_kwh);
    ep.c_st_om_per_kwh_yr = get_double("econ.storage.om_per_kwh_yr", ep.c_st_om_per_kwh_yr);
    ep.c_e = get_double("econ.storage.present_value_coeff", ep.c_e);
    cfg.problem.clamp_export = get_bool("econ.clamp_export", false);

    // -- caps, candidate sites, encoding
    cfg.problem.caps.dg_fraction = get_double("caps.dg_fraction", 0.30);
    cfg.problem.caps.storage_fraction = get_double("caps.storage_fraction", 0.10);

    const std::string sites = get_string("sites", "", true);
    if (!sites.empty()) {
        for (const std::string& tok : csv::split(sites)) {
            try {
                const int bus = csv::to_int(tok, "sites");
                cfg.problem.net.index_of(bus);  // existence check
                cfg.problem.sites.push_back(CandidateSite{bus, true, true, true});
            } catch (const std::exception& e) {
                errors.push_back(std::string("sites: ") + e.what());
            }
        }
    }

    EncodingOptions& enc = cfg.problem.encoding;
    enc.dg_bits = get_int("encoding.dg_bits", enc.dg_bits);
    enc.dg_unit_kw = get_double("encoding.dg_unit_kw", enc.dg_unit_kw);
    enc.storage_energy_bits = get_int("encoding.storage_energy_bits", enc.storage_energy_bits);
    enc.storage_energy_unit_kwh =
        get_double("encoding.storage_energy_unit_kwh", enc.storage_energy_unit_kwh);
    enc.storage_power_bits = get_int("encoding.storage_power_bits", enc.storage_power_bits);
    enc.storage_power_unit_kw =
        get_double("encoding.storage_power_unit_kw", enc.storage_power_unit_kw);

    // -- storage behaviour
    StorageDefaults& sd = cfg.problem.dispatch.storage;
    sd.eta_ch = get_double("storage.eta_charge", sd.eta_ch);
    sd.eta_dc = get_double("storage.eta_discharge", sd.eta_dc);
    sd.soc_min_frac = get_double("storage.soc_min_frac", sd.soc_min_frac);
    sd.soc_max_frac = get_double("storage.soc_max_frac", sd.soc_max_frac);
    sd.soc_init_frac = get_double("storage.soc_init_frac", sd.soc_init_frac);
    sd.power_ratio_per_hour = get_double("storage.power_ratio_per_hour", sd.power_ratio_per_hour);

    // -- swarm settings
    cfg.problem.upper.n_particles = get_int("swarm.upper.particles", 20);
    cfg.problem.upper.max_iter = get_int("swarm.upper.iterations", 30);
    cfg.problem.dispatch.swarm.n_particles = get_int("swarm.lower.particles", 20);
    cfg.problem.dispatch.swarm.max_iter = get_int("swarm.lower.iterations", 50);
    cfg.problem.dispatch.bits_per_hour = get_int("dispatch.bits_per_hour", 3);

    cfg.problem.seed = static_cast<std::uint64_t>(get_int("seed", 42));
    cfg.problem.dispatch.seed = cfg.problem.seed;
    cfg.scenario = get_int("scenario", 2);
    cfg.scenario1_flat_price_per_kwh = get_double("scenario1.flat_price_per_kwh", 0.05);
    cfg.output_dir = get_string("output.dir", "out", false);

    // -- optional fixed plan (dispatch-only runs): plan.bus<ID>.<field>
    std::map<int, SiteAllocation> fixed;
    for (const auto& [key, value] : kv) {
        if (key.rfind("plan.bus", 0) != 0) continue;
        consumed.insert(key);
        const auto dot = key.find('.', 8);
        if (dot == std::string::npos) {
            errors.push_back(key + ": expected plan.bus<ID>.<field>");
            continue;
        }
        try {
            const int bus = csv::to_int(key.substr(8, dot - 8), key);
            cfg.problem.net.index_of(bus);
            const std::string field = key.substr(dot + 1);
            const double amount = csv::to_double(value, key);
            SiteAllocation& site = fixed[bus];
            site.bus = bus;
            if (field == "wt_kw")
                site.wt_kw = amount;
            else if (field == "pv_kw")
                site.pv_kw = amount;
            else if (field == "storage_kwh")
                site.storage_kwh = amount;
            else if (field == "storage_kw")
                site.storage_kw = amount;
            else
                errors.push_back(key + ": unknown plan field '" + field + "'");
            echo_value(key, value, false);
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
    }
    for (const auto& [bus, site] : fixed) cfg.fixed_plan.sites.push_back(site);

    for (const auto& [key, value] : kv)
        if (!consumed.count(key)) errors.push_back(key + ": unknown key");

    // -- derived: the 96-slot expected-output profiles
    if (errors.empty()) {
        try {
            std::vector<std::string> deficits;
            cfg.problem.profiles =
                hourly_expected_profiles(cfg.weather, cfg.curve, cfg.seq_step_per_unit, &deficits);
            for (const std::string& w : deficits) cfg.echo.push_back("warning: " + w);
        } catch (const std::exception& e) {
            errors.push_back(std::string("weather.file: ") + e.what());
        }
    }

    if (!errors.empty()) throw ConfigError(errors);
    return cfg;
}

}  // namespace adnplan
