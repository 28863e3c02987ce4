// Upper-level model: genome encoding of siting-and-sizing decisions, capacity
// feasibility, nested lower-level evaluation with caching, and the bi-level
// and two-stage sequential planning drivers.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnplan/dispatch.hpp"
#include "adnplan/economics.hpp"
#include "adnplan/ibpso.hpp"
#include "adnplan/plan.hpp"
#include "adnplan/prob_sequence.hpp"
#include "adnplan/radial_grid.hpp"

namespace adnplan {

struct CandidateSite {
    int bus = 0;
    bool allow_wt = true;
    bool allow_pv = true;
    bool allow_storage = true;
};

enum class DeviceField { WT, PV, StorageEnergy, StoragePower };

struct FieldSpec {
    std::size_t site = 0;
    DeviceField device = DeviceField::WT;
    int bits = 0;
    double unit = 0.0;
};

struct EncodingOptions {
    int dg_bits = 5;
    double dg_unit_kw = 50.0;
    int storage_energy_bits = 4;
    double storage_energy_unit_kwh = 50.0;
    int storage_power_bits = 4;  // 0 derives the rating from capacity instead
    double storage_power_unit_kw = 25.0;
};

struct EncodingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Fixed field order per site: WT, PV, storage energy, storage power.
struct EncodingSpec {
    std::vector<FieldSpec> fields;

    std::size_t total_bits() const {
        std::size_t n = 0;
        for (const FieldSpec& f : fields) n += static_cast<std::size_t>(f.bits);
        return n;
    }
};

inline EncodingSpec make_encoding(const std::vector<CandidateSite>& sites,
                                  const EncodingOptions& opt) {
    if ((opt.dg_bits > 0 && !(opt.dg_unit_kw > 0.0)) ||
        (opt.storage_energy_bits > 0 && !(opt.storage_energy_unit_kwh > 0.0)) ||
        (opt.storage_power_bits > 0 && !(opt.storage_power_unit_kw > 0.0)))
        throw EncodingError("make_encoding: encoded fields need positive unit steps");
    EncodingSpec spec;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        if (sites[i].allow_wt && opt.dg_bits > 0)
            spec.fields.push_back({i, DeviceField::WT, opt.dg_bits, opt.dg_unit_kw});
        if (sites[i].allow_pv && opt.dg_bits > 0)
            spec.fields.push_back({i, DeviceField::PV, opt.dg_bits, opt.dg_unit_kw});
        if (sites[i].allow_storage && opt.storage_energy_bits > 0)
            spec.fields.push_back({i, DeviceField::StorageEnergy, opt.storage_energy_bits,
                                   opt.storage_energy_unit_kwh});
        if (sites[i].allow_storage && opt.storage_power_bits > 0)
            spec.fields.push_back(
                {i, DeviceField::StoragePower, opt.storage_power_bits, opt.storage_power_unit_kw});
    }
    return spec;
}

inline Plan decode(const BitVector& genome, const EncodingSpec& spec,
                   const std::vector<CandidateSite>& sites) {
    if (genome.size() != spec.total_bits())
        throw EncodingError("decode: genome length " + std::to_string(genome.size()) +
                            " does not match encoding width " + std::to_string(spec.total_bits()));
    Plan plan;
    plan.sites.resize(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) plan.sites[i].bus = sites[i].bus;
    std::size_t pos = 0;
    for (const FieldSpec& f : spec.fields) {
        std::uint64_t value = 0;
        for (int b = 0; b < f.bits; ++b) value = (value << 1) | genome[pos++];
        const double amount = static_cast<double>(value) * f.unit;
        SiteAllocation& site = plan.sites[f.site];
        switch (f.device) {
            case DeviceField::WT: site.wt_kw = amount; break;
            case DeviceField::PV: site.pv_kw = amount; break;
            case DeviceField::StorageEnergy: site.storage_kwh = amount; break;
            case DeviceField::StoragePower: site.storage_kw = amount; break;
        }
    }
    return plan;
}

// Inverse of decode for unit-aligned plans; values are rounded to the nearest
// unit step and clamped to the field range.
inline BitVector encode(const Plan& plan, const EncodingSpec& spec,
                        const std::vector<CandidateSite>& sites) {
    if (plan.sites.size() != sites.size())
        throw EncodingError("encode: plan does not match the candidate-site list");
    BitVector genome(spec.total_bits(), 0);
    std::size_t pos = 0;
    for (const FieldSpec& f : spec.fields) {
        const SiteAllocation& site = plan.sites[f.site];
        double amount = 0.0;
        switch (f.device) {
            case DeviceField::WT: amount = site.wt_kw; break;
            case DeviceField::PV: amount = site.pv_kw; break;
            case DeviceField::StorageEnergy: amount = site.storage_kwh; break;
            case DeviceField::StoragePower: amount = site.storage_kw; break;
        }
        const std::uint64_t max_value = (1ull << f.bits) - 1;
        std::uint64_t value = static_cast<std::uint64_t>(
            std::llround(std::max(0.0, amount) / f.unit));
        value = std::min(value, max_value);
        for (int b = 0; b < f.bits; ++b)
            genome[pos + static_cast<std::size_t>(f.bits) - 1 - b] = (value >> b) & 1;
        pos += static_cast<std::size_t>(f.bits);
    }
    return genome;
}

struct CapacityCaps {
    double dg_fraction = 0.30;       // of total nominal active load
    double storage_fraction = 0.10;  // of total nominal active load, in kWh
};

struct CapacityCheck {
    bool feasible = true;
    double violation_norm = 0.0;  // sum of relative cap excesses
    std::vector<std::string> notes;
};

// DG generation may not exceed total demand plus the no-DG base-case losses,
// and both device classes are bounded by their penetration caps. The reactive
// bound follows the configured constant power factor (zero vars at unity).
inline CapacityCheck capacity_feasible(const Plan& plan, const RadialNetwork& net,
                                       const CapacityCaps& caps, double base_loss_p_kw,
                                       double base_loss_q_kvar, double dg_tan_phi_value = 0.0) {
    CapacityCheck out;
    const double load_p = net.total_load_kw();
    const double load_q = net.total_load_kvar();
    const double dg_p = plan.total_wt_kw() + plan.total_pv_kw();
    const double dg_q = dg_p * dg_tan_phi_value;

    auto check = [&out](double value, double limit, const std::string& what) {
        if (value > limit + 1e-9) {
            out.feasible = false;
            out.violation_norm += (value - limit) / std::max(limit, 1.0);
            out.notes.push_back(what + ": " + std::to_string(value) + " exceeds " +
                                std::to_string(limit));
        }
    };
    check(dg_p, load_p + base_loss_p_kw, "DG active power vs demand plus base losses");
    check(dg_q, load_q + base_loss_q_kvar, "DG reactive power vs demand plus base losses");
    check(dg_p, caps.dg_fraction * load_p, "DG penetration cap");
    check(plan.total_storage_kwh(), caps.storage_fraction * load_p, "storage penetration cap");
    for (const SiteAllocation& site : plan.sites)
        if (site.storage_kw > site.storage_kwh + 1e-9) {
            out.feasible = false;
            out.violation_norm +=
                (site.storage_kw - site.storage_kwh) / std::max(site.storage_kwh, 1.0);
            out.notes.push_back("storage rating above hourly energy bound at bus " +
                                std::to_string(site.bus));
        }
    return out;
}

struct PlannerProblem {
    RadialNetwork net;
    std::vector<HourlyExpectation> profiles;
    Tariff tariff;
    LoadProfile loads = LoadProfile::flat();
    EconParams econ;
    CapacityCaps caps;
    std::vector<CandidateSite> sites;
    EncodingOptions encoding;
    SwarmConfig upper{20, 30};
    DispatchOptions dispatch;
    Plan base_plan;  // frozen allocation merged into every candidate
    std::vector<BitVector> warm_starts;
    bool clamp_export = false;
    std::uint64_t seed = 42;
    std::string scenario_label = "plan";
};

struct PlanningReport {
    std::string scenario;
    Plan best_plan;
    BitVector genome;
    CostBreakdown cost;
    DispatchResult dispatch;
    std::vector<IterationStats> history;
    double fitness = 0.0;
    bool feasible = true;
};

namespace detail {

inline Plan merge_plans(const Plan& base, const Plan& add) {
    Plan merged = add;
    for (const SiteAllocation& b : base.sites) {
        bool found = false;
        for (SiteAllocation& m : merged.sites) {
            if (m.bus == b.bus) {
                m.wt_kw += b.wt_kw;
                m.pv_kw += b.pv_kw;
                m.storage_kwh += b.storage_kwh;
                m.storage_kw += b.storage_kw;
                found = true;
                break;
            }
        }
        if (!found) merged.sites.push_back(b);
    }
    return merged;
}

inline std::uint64_t genome_hash(const BitVector& genome) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::uint8_t b : genome) h = (h ^ b) * 0x100000001B3ull;
    return h;
}

}  // namespace detail

// Fitness provider for the outer swarm: decodes a genome, runs the nested
// four-season dispatch, assembles the annual cost, and adds capacity and
// network-limit penalties scaled by the empty-plan baseline cost.
class UpperLevel {
public:
    explicit UpperLevel(const PlannerProblem& problem)
        : p_(problem), spec_(make_encoding(problem.sites, problem.encoding)) {
        p_.net.validate();
        if (p_.profiles.size() != static_cast<std::size_t>(kSlots))
            throw std::invalid_argument("UpperLevel: expected 96 hourly expectations");
        const PowerFlowResult base = solve_power_flow(p_.net, {}, p_.dispatch.pf);
        base_loss_p_ = base.p_loss_kw;
        base_loss_q_ = base.q_loss_kvar;
        const double nominal = p_.net.total_load_kw();
        for (int s = 1; s <= kSeasons; ++s)
            for (int h = 0; h < kHoursPerDay; ++h)
                load_kw_[slot_index(s, h)] = nominal * p_.loads.at(s, h);

        DispatchOptions dopt = p_.dispatch;
        dopt.seed = stream_seed(p_.seed, 0xBA5Eu, 0);
        const DispatchResult empty =
            optimize_dispatch(Plan{}, p_.net, p_.profiles, p_.loads, p_.tariff, dopt);
        baseline_ = annual_cost(Plan{}, p_.profiles, empty.total_levels, empty.loss_kw, load_kw_,
                                p_.tariff, p_.econ, p_.clamp_export);
        baseline_losses_ = empty.loss_kw;
    }

    struct Evaluation {
        Plan plan;
        CostBreakdown cost;
        DispatchResult dispatch;
        double fitness = 0.0;
        bool feasible = true;
        CapacityCheck capacity;
    };

    const EncodingSpec& encoding() const { return spec_; }
    const CostBreakdown& baseline_cost() const { return baseline_; }
    const SeasonHourTable& baseline_losses() const { return baseline_losses_; }
    const std::array<double, kSlots>& slot_loads_kw() const { return load_kw_; }

    double evaluate(const BitVector& genome) {
        const auto it = cache_.find(genome);
        if (it != cache_.end()) return it->second;
        const double fitness = evaluate_full(genome).fitness;
        cache_.emplace(genome, fitness);
        return fitness;
    }

    Evaluation evaluate_full(const BitVector& genome) {
        Evaluation ev;
        ev.plan = detail::merge_plans(p_.base_plan, decode(genome, spec_, p_.sites));
        ev.capacity = capacity_feasible(ev.plan, p_.net, p_.caps, base_loss_p_, base_loss_q_,
                                        dg_tan_phi(p_.dispatch.dg_power_factor));
        if (!ev.capacity.feasible) {
            ev.feasible = false;
            ev.fitness = baseline_.total + penalty(ev.capacity.violation_norm);
            return ev;
        }
        DispatchOptions dopt = p_.dispatch;
        dopt.seed = stream_seed(p_.seed, 0xD0u, detail::genome_hash(genome));
        ev.dispatch = optimize_dispatch(ev.plan, p_.net, p_.profiles, p_.loads, p_.tariff, dopt);
        ev.cost = annual_cost(ev.plan, p_.profiles, ev.dispatch.total_levels, ev.dispatch.loss_kw,
                              load_kw_, p_.tariff, p_.econ, p_.clamp_export);
        double extra = 0.0;
        double limit_norm = 0.0;
        for (double v : ev.dispatch.limit_violation_norm) limit_norm += v;
        if (limit_norm > 0.0) extra += penalty(limit_norm);
        if (!ev.dispatch.feasible) extra += 1e3 * baseline_.total;
        ev.fitness = ev.cost.total + extra;
        ev.feasible = extra == 0.0;
        return ev;
    }

private:
    double penalty(double violation_norm) const {
        const double scaled = 1e3 * violation_norm;
        return baseline_.total * scaled * scaled;
    }

    PlannerProblem p_;
    EncodingSpec spec_;
    double base_loss_p_ = 0.0;
    double base_loss_q_ = 0.0;
    std::array<double, kSlots> load_kw_{};
    CostBreakdown baseline_;
    SeasonHourTable baseline_losses_ = zero_table();
    std::map<BitVector, double> cache_;
};

// Constructive seeds for the outer swarm: for every candidate site, a plan
// concentrating the capped DG build (and the capped storage) there, rounded
// down to the encoding units. All of them are capacity-feasible.
inline std::vector<BitVector> heuristic_warm_starts(const PlannerProblem& problem,
                                                    const EncodingSpec& spec) {
    std::vector<BitVector> seeds;
    const double load = problem.net.total_load_kw();
    auto floor_units = [](double amount, double unit, int bits) {
        const double max_value = (static_cast<double>(1ull << bits) - 1.0) * unit;
        return std::min(std::floor(amount / unit) * unit, max_value);
    };
    for (std::size_t i = 0; i < problem.sites.size(); ++i) {
        const CandidateSite& site = problem.sites[i];
        for (const bool wind_first : {true, false}) {
            Plan seed;
            seed.sites.resize(problem.sites.size());
            for (std::size_t k = 0; k < problem.sites.size(); ++k)
                seed.sites[k].bus = problem.sites[k].bus;
            SiteAllocation& alloc = seed.sites[i];
            const double dg_cap = problem.caps.dg_fraction * load;
            if (wind_first && site.allow_wt && problem.encoding.dg_bits > 0)
                alloc.wt_kw = floor_units(dg_cap, problem.encoding.dg_unit_kw,
                                          problem.encoding.dg_bits);
            else if (!wind_first && site.allow_pv && problem.encoding.dg_bits > 0)
                alloc.pv_kw = floor_units(dg_cap, problem.encoding.dg_unit_kw,
                                          problem.encoding.dg_bits);
            if (site.allow_storage && problem.encoding.storage_energy_bits > 0) {
                alloc.storage_kwh =
                    floor_units(problem.caps.storage_fraction * load,
                                problem.encoding.storage_energy_unit_kwh,
                                problem.encoding.storage_energy_bits);
                if (problem.encoding.storage_power_bits > 0)
                    alloc.storage_kw = floor_units(
                        alloc.storage_kwh * problem.dispatch.storage.power_ratio_per_hour,
                        problem.encoding.storage_power_unit_kw,
                        problem.encoding.storage_power_bits);
            }
            if (seed.empty()) continue;
            seeds.push_back(encode(seed, spec, problem.sites));
        }
    }
    return seeds;
}

// Full bi-level run: the outer swarm searches siting-and-sizing genomes, each
// evaluation solving the four seasonal dispatch problems for that candidate.
inline PlanningReport plan(const PlannerProblem& problem) {
    UpperLevel upper(problem);
    const std::size_t n_bits = upper.encoding().total_bits();

    PlanningReport report;
    report.scenario = problem.scenario_label;
    if (n_bits == 0) {
        const UpperLevel::Evaluation ev = upper.evaluate_full(BitVector{});
        report.best_plan = ev.plan;
        report.cost = ev.cost;
        report.dispatch = ev.dispatch;
        report.fitness = ev.fitness;
        report.feasible = ev.feasible;
        return report;
    }

    std::vector<BitVector> warm;
    warm.emplace_back(n_bits, 0);  // the do-nothing plan anchors feasibility
    for (const BitVector& w : heuristic_warm_starts(problem, upper.encoding()))
        warm.push_back(w);
    for (const BitVector& w : problem.warm_starts)
        if (w.size() == n_bits) warm.push_back(w);
    if (warm.size() > static_cast<std::size_t>(problem.upper.n_particles))
        warm.resize(static_cast<std::size_t>(problem.upper.n_particles));

    SwarmConfig swarm = problem.upper;
    swarm.seed = problem.seed;
    const RunResult run_result =
        run([&upper](const BitVector& g) { return upper.evaluate(g); }, n_bits, swarm, warm);

    const UpperLevel::Evaluation best = upper.evaluate_full(run_result.best_position);
    report.best_plan = best.plan;
    report.genome = run_result.best_position;
    report.cost = best.cost;
    report.dispatch = best.dispatch;
    report.history = run_result.history;
    report.fitness = run_result.best_fitness;
    report.feasible = best.feasible;
    return report;
}

// Two-stage comparison model: DGs are planned without storage first, then the
// storage allocation is optimized around the frozen DG decision.
inline PlanningReport sequential_baseline(const PlannerProblem& problem) {
    PlannerProblem stage1 = problem;
    for (CandidateSite& s : stage1.sites) s.allow_storage = false;
    stage1.seed = detail::mix64(problem.seed ^ 0x5E91ull);
    stage1.scenario_label = problem.scenario_label + " (sequential stage 1)";
    const PlanningReport first = plan(stage1);

    PlannerProblem stage2 = problem;
    for (CandidateSite& s : stage2.sites) {
        s.allow_wt = false;
        s.allow_pv = false;
    }
    stage2.base_plan = first.best_plan;  // already includes any caller-supplied base
    stage2.seed = detail::mix64(problem.seed ^ 0x5E92ull);
    stage2.scenario_label = problem.scenario_label + " (sequential)";
    PlanningReport second = plan(stage2);
    return second;
}

struct ModelComparison {
    PlanningReport bilevel;
    PlanningReport sequential;
};

// Side-by-side protocol for the two models: the staged result seeds the joint
// search, so the bi-level run continues from the staged solution and can only
// refine it. Both totals are then costed under the joint run's evaluation so
// the comparison reflects the plans rather than lower-level seeding noise.
inline ModelComparison compare_models(const PlannerProblem& problem) {
    ModelComparison cmp;
    cmp.sequential = sequential_baseline(problem);
    PlannerProblem joint = problem;
    const EncodingSpec spec = make_encoding(problem.sites, problem.encoding);
    joint.warm_starts.push_back(encode(cmp.sequential.best_plan, spec, problem.sites));
    cmp.bilevel = plan(joint);

    UpperLevel common(joint);
    const UpperLevel::Evaluation staged = common.evaluate_full(joint.warm_starts.back());
    cmp.sequential.best_plan = staged.plan;
    cmp.sequential.cost = staged.cost;
    cmp.sequential.dispatch = staged.dispatch;
    cmp.sequential.fitness = staged.fitness;
    cmp.sequential.feasible = staged.feasible;
    return cmp;
}

}  // namespace adnplan
