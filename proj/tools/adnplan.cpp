// Command-line front end: one-shot power flow, dispatch for a fixed plan,
// full bi-level planning, scenario batches, storage-penetration sweeps, and
// voltage-CDF export.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "adnplan/adnplan.hpp"

namespace {

namespace fs = std::filesystem;
using namespace adnplan;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    int seed_override = -1;
};

RunConfig load(const CommonArgs& args, bool echo = true) {
    RunConfig cfg = load_config(args.config_path);
    if (args.seed_override >= 0) {
        cfg.problem.seed = static_cast<std::uint64_t>(args.seed_override);
        cfg.problem.dispatch.seed = cfg.problem.seed;
    }
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (echo) {
        std::cout << "configuration:\n";
        for (const std::string& line : cfg.echo) std::cout << "  " << line << "\n";
    }
    return cfg;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    const fs::path path = fs::path(cfg.output_dir) / name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    std::cout << "writing " << path.string() << "\n";
    return out;
}

void print_plan(const PlanningReport& report) {
    std::cout << "plan [" << report.scenario << "]"
              << (report.feasible ? "" : "  (flagged infeasible)") << "\n";
    for (const SiteAllocation& s : report.best_plan.sites) {
        if (s.wt_kw <= 0 && s.pv_kw <= 0 && s.storage_kwh <= 0) continue;
        std::cout << "  bus " << s.bus << ": wt " << csv::format_sig(s.wt_kw) << " kW, pv "
                  << csv::format_sig(s.pv_kw) << " kW, storage " << csv::format_sig(s.storage_kwh)
                  << " kWh / " << csv::format_sig(s.storage_kw) << " kW\n";
    }
    std::cout << "  cost: c1 " << csv::format_sig(report.cost.c1) << "  c2 "
              << csv::format_sig(report.cost.c2) << "  c3 " << csv::format_sig(report.cost.c3)
              << "  total " << csv::format_sig(report.cost.total) << " $/yr\n";
}

int cmd_powerflow(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const PowerFlowResult res = solve_power_flow(cfg.problem.net);
    double vmin = 1e9;
    int vmin_bus = cfg.problem.net.slack_bus;
    for (std::size_t i = 0; i < cfg.problem.net.buses.size(); ++i)
        if (res.v_mag_pu[i] < vmin) {
            vmin = res.v_mag_pu[i];
            vmin_bus = cfg.problem.net.buses[i].id;
        }
    std::cout << "base case: loss " << csv::format_sig(res.p_loss_kw) << " kW, min voltage "
              << csv::format_sig(vmin) << " pu at bus " << vmin_bus << ", " << res.sweeps
              << " sweeps\n";
    auto out = open_out(cfg, "voltages.csv");
    out << "bus,v_pu\n";
    for (std::size_t i = 0; i < cfg.problem.net.buses.size(); ++i)
        out << cfg.problem.net.buses[i].id << ',' << csv::format_sig(res.v_mag_pu[i]) << '\n';
    const auto violations = check_limits(res, cfg.problem.net);
    for (const LimitViolation& v : violations)
        std::cout << "  limit violation at element " << v.element << ": "
                  << csv::format_sig(v.value) << " vs " << csv::format_sig(v.limit) << "\n";
    return 0;
}

int cmd_dispatch(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    if (cfg.fixed_plan.sites.empty())
        throw std::runtime_error("dispatch: config has no plan.bus<ID>.* entries");
    const DispatchResult result =
        optimize_dispatch(cfg.fixed_plan, cfg.problem.net, cfg.problem.profiles,
                          cfg.problem.loads, cfg.problem.tariff, cfg.problem.dispatch);
    PlanningReport report;
    report.scenario = "dispatch";
    report.best_plan = cfg.fixed_plan;
    report.dispatch = result;
    for (int s = 1; s <= kSeasons; ++s)
        std::cout << "season " << s << ": daily fluctuating cost "
                  << csv::format_sig(result.f2_per_season[s - 1]) << " $\n";
    auto out = open_out(cfg, "dispatch.csv");
    write_dispatch_csv(out, report);
    return 0;
}

int cmd_plan(const CommonArgs& args, int scenario, bool sequential, bool compare) {
    RunConfig cfg = load(args);
    if (scenario > 0) cfg.scenario = scenario;
    const PlannerProblem problem = problem_for_scenario(cfg, cfg.scenario);
    if (compare) {
        const ModelComparison cmp = compare_models(problem);
        print_plan(cmp.bilevel);
        print_plan(cmp.sequential);
        auto out = open_out(cfg, "costs_comparison.csv");
        out << "model,c1,c2,c3,total\n";
        for (const auto* r : {&cmp.bilevel, &cmp.sequential})
            out << (r == &cmp.bilevel ? "bilevel" : "sequential") << ','
                << csv::format_sig(r->cost.c1) << ',' << csv::format_sig(r->cost.c2) << ','
                << csv::format_sig(r->cost.c3) << ',' << csv::format_sig(r->cost.total) << '\n';
        return 0;
    }
    const PlanningReport report = sequential ? sequential_baseline(problem) : plan(problem);
    print_plan(report);
    {
        ScenarioResult wrapped;
        wrapped.scenario = cfg.scenario;
        wrapped.report = report;
        const std::vector<ScenarioResult> one{wrapped};
        auto alloc = open_out(cfg, "allocation.csv");
        write_allocation_csv(alloc, one);
        auto costs = open_out(cfg, "costs.csv");
        write_cost_csv(costs, one);
    }
    auto dispatch_out = open_out(cfg, "dispatch.csv");
    write_dispatch_csv(dispatch_out, report);
    auto hist = open_out(cfg, "convergence.csv");
    write_history_csv(hist, report.history);
    return 0;
}

int cmd_scenarios(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    const std::vector<int> all{1, 2, 3, 4};
    const std::vector<ScenarioResult> results = run_scenarios(cfg, all);
    for (const ScenarioResult& r : results) {
        if (!r.ok()) {
            std::cout << "scenario " << r.scenario << " failed: " << r.error << "\n";
            continue;
        }
        print_plan(r.report);
    }
    auto alloc = open_out(cfg, "allocation.csv");
    write_allocation_csv(alloc, results);
    auto costs = open_out(cfg, "costs.csv");
    write_cost_csv(costs, results);
    for (const ScenarioResult& r : results) {
        if (!r.ok()) continue;
        auto out = open_out(cfg, "dispatch_scenario" + std::to_string(r.scenario) + ".csv");
        write_dispatch_csv(out, r.report);
        auto hist = open_out(cfg, "convergence_scenario" + std::to_string(r.scenario) + ".csv");
        write_history_csv(hist, r.report.history);
    }
    return 0;
}

int cmd_sweep(const CommonArgs& args, std::vector<double> caps) {
    const RunConfig cfg = load(args);
    if (caps.empty()) caps = {0.10, 0.20, 0.30};
    const std::vector<SweepRow> rows = sweep_storage_penetration(cfg, caps);
    for (const SweepRow& r : rows)
        std::cout << "cap " << csv::format_sig(r.cap_fraction) << ": storage "
                  << csv::format_sig(r.plan.total_storage_kwh()) << " kWh, total "
                  << csv::format_sig(r.cost.total) << " $/yr\n";
    auto out = open_out(cfg, "sweep.csv");
    write_sweep_csv(out, rows);
    return 0;
}

int cmd_voltage_cdf(const CommonArgs& args, int bus) {
    const RunConfig cfg = load(args);
    const ScenarioResult joint = run_scenario(cfg, 2);
    if (!joint.ok()) throw std::runtime_error("joint scenario failed: " + joint.error);

    RunConfig dg_only_cfg = cfg;
    for (CandidateSite& s : dg_only_cfg.problem.sites) s.allow_storage = false;
    const ScenarioResult dg_only = run_scenario(dg_only_cfg, 2);
    if (!dg_only.ok()) throw std::runtime_error("DG-only scenario failed: " + dg_only.error);

    const int target = bus > 0 ? bus : min_voltage_bus(joint, cfg.problem.net);
    std::cout << "voltage CDF at bus " << target << "\n";
    const auto joint_cdf = voltage_cdf(joint, target, cfg.problem.net);
    const auto dg_cdf = voltage_cdf(dg_only, target, dg_only_cfg.problem.net);
    auto out1 = open_out(cfg, "voltage_cdf_joint_bus" + std::to_string(target) + ".csv");
    write_cdf_csv(out1, joint_cdf);
    auto out2 = open_out(cfg, "voltage_cdf_dgonly_bus" + std::to_string(target) + ".csv");
    write_cdf_csv(out2, dg_cdf);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint DG and storage planning for radial distribution networks"};
    app.require_subcommand(1);

    CommonArgs args;
    auto attach_common = [&args](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "configuration file")->required();
        sub->add_option("--seed", args.seed_override, "override the configured random seed");
        sub->add_option("--out", args.out_dir, "override the configured output directory");
    };

    auto* powerflow = app.add_subcommand("powerflow", "solve the base-case power flow");
    auto* dispatch = app.add_subcommand("dispatch", "optimize storage dispatch for a fixed plan");
    auto* plan_cmd = app.add_subcommand("plan", "run the full bi-level planning");
    int scenario = -1;
    bool sequential = false;
    bool compare = false;
    plan_cmd->add_option("--scenario", scenario, "scenario selector (1..4)");
    plan_cmd->add_flag("--sequential", sequential, "two-stage model instead of bi-level");
    plan_cmd->add_flag("--compare", compare,
                       "run both models; the staged result seeds the joint search");
    auto* scenarios_cmd = app.add_subcommand("scenarios", "run scenarios 1-4 and compare");
    auto* sweep = app.add_subcommand("sweep", "storage penetration sweep");
    std::vector<double> caps;
    sweep->add_option("--caps", caps, "cap fractions, e.g. 0.1 0.2 0.3");
    auto* cdf = app.add_subcommand("voltage-cdf", "emit voltage CDFs (joint vs DG-only)");
    int bus = -1;
    cdf->add_option("--bus", bus, "bus id (defaults to the minimum-voltage bus)");

    for (CLI::App* sub : {powerflow, dispatch, plan_cmd, scenarios_cmd, sweep, cdf})
        attach_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (powerflow->parsed()) return cmd_powerflow(args);
        if (dispatch->parsed()) return cmd_dispatch(args);
        if (plan_cmd->parsed()) return cmd_plan(args, scenario, sequential, compare);
        if (scenarios_cmd->parsed()) return cmd_scenarios(args);
        if (sweep->parsed()) return cmd_sweep(args, caps);
        if (cdf->parsed()) return cmd_voltage_cdf(args, bus);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
