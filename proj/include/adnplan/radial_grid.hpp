// Radial distribution-network model, forward-backward-sweep power flow, limit
// checking, and the comma-separated network file format.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnplan/csv.hpp"

namespace adnplan {

struct Bus {
    int id = 0;
    double p_load_kw = 0.0;
    double q_load_kvar = 0.0;
};

struct Branch {
    int from_bus = 0;
    int to_bus = 0;
    double r_ohm = 0.0;
    double x_ohm = 0.0;
    double i_max_a = 0.0;  // 0 means no limit
};

struct TopologyError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& msg, double residual_pu)
        : std::runtime_error(msg), residual(residual_pu) {}
    double residual = 0.0;
};

struct RadialNetwork {
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    int slack_bus = 1;
    double v_base_kv = 12.66;
    double s_base_kva = 10000.0;
    double v_min_pu = 0.90;
    double v_max_pu = 1.05;

    std::size_t index_of(int bus_id) const {
        for (std::size_t i = 0; i < buses.size(); ++i)
            if (buses[i].id == bus_id) return i;
        throw std::invalid_argument("RadialNetwork: unknown bus id " + std::to_string(bus_id));
    }

    double total_load_kw() const {
        double s = 0.0;
        for (const Bus& b : buses) s += b.p_load_kw;
        return s;
    }

    double total_load_kvar() const {
        double s = 0.0;
        for (const Bus& b : buses) s += b.q_load_kvar;
        return s;
    }

    double z_base_ohm() const { return v_base_kv * v_base_kv * 1000.0 / s_base_kva; }
    double i_base_a() const { return s_base_kva / (std::sqrt(3.0) * v_base_kv); }

    void validate() const {
        if (buses.empty()) throw TopologyError("network: no buses");
        std::map<int, int> count;
        for (const Bus& b : buses) {
            if (b.p_load_kw < 0.0 || b.q_load_kvar < 0.0)
                throw std::invalid_argument("network: negative load at bus " + std::to_string(b.id));
            if (++count[b.id] > 1)
                throw TopologyError("network: duplicate bus id " + std::to_string(b.id));
        }
        if (!count.count(slack_bus)) throw TopologyError("network: slack bus not present");
        if (branches.size() != buses.size() - 1)
            throw TopologyError("network: branch count must equal bus count - 1");
        for (const Branch& br : branches) {
            if (!count.count(br.from_bus) || !count.count(br.to_bus))
                throw TopologyError("network: branch references unknown bus");
            if (br.r_ohm < 0.0 || br.x_ohm < 0.0)
                throw std::invalid_argument("network: negative branch impedance");
        }
        // connectivity: with n-1 branches, reaching every bus from the slack
        // also rules out cycles
        std::map<int, std::vector<int>> adj;
        for (const Branch& br : branches) {
            adj[br.from_bus].push_back(br.to_bus);
            adj[br.to_bus].push_back(br.from_bus);
        }
        std::vector<int> stack{slack_bus};
        std::map<int, bool> visited{{slack_bus, true}};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (!visited[v]) {
                    visited[v] = true;
                    stack.push_back(v);
                }
        }
        for (const Bus& b : buses)
            if (!visited[b.id])
                throw TopologyError("network: bus " + std::to_string(b.id) +
                                    " not connected to the slack bus");
    }
};

// Net power added at a bus on top of its nominal load: DG output counts
// positive, storage charging negative, discharging positive.
struct Injection {
    double p_kw = 0.0;
    double q_kvar = 0.0;
};

struct PowerFlowResult {
    std::vector<double> v_mag_pu;       // per bus, network order
    std::vector<double> branch_p_kw;    // sending-end flow, network branch order
    std::vector<double> branch_q_kvar;
    std::vector<double> branch_i_pu;
    double p_loss_kw = 0.0;
    double q_loss_kvar = 0.0;
    double slack_p_kw = 0.0;
    double slack_q_kvar = 0.0;
    int sweeps = 0;
    double max_dv_pu = 0.0;
};

struct PowerFlowOptions {
    double tol_pu = 1e-10;
    int max_sweeps = 200;
};

namespace detail {

struct SweepOrder {
    std::vector<std::size_t> bus_order;      // slack first, breadth-first
    std::vector<std::size_t> branch_order;   // parallel to bus_order[1..]
    std::vector<std::size_t> branch_parent;  // bus index feeding each branch
    std::vector<std::size_t> branch_child;   // bus index fed by each branch
};

inline SweepOrder build_sweep_order(const RadialNetwork& net) {
    const std::size_t n = net.buses.size();
    std::map<int, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[net.buses[i].id] = i;

    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);  // (neighbor, branch)
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        const std::size_t u = idx.at(net.branches[b].from_bus);
        const std::size_t v = idx.at(net.branches[b].to_bus);
        adj[u].push_back({v, b});
        adj[v].push_back({u, b});
    }

    SweepOrder order;
    order.bus_order.reserve(n);
    std::vector<bool> visited(n, false);
    const std::size_t root = idx.at(net.slack_bus);
    order.bus_order.push_back(root);
    visited[root] = true;
    for (std::size_t head = 0; head < order.bus_order.size(); ++head) {
        const std::size_t u = order.bus_order[head];
        for (auto [v, b] : adj[u]) {
            if (visited[v]) continue;
            visited[v] = true;
            order.bus_order.push_back(v);
            order.branch_order.push_back(b);
            order.branch_parent.push_back(u);
            order.branch_child.push_back(v);
        }
    }
    return order;
}

}  // namespace detail

// Forward-backward sweep from a flat 1.0 pu start. Injections are indexed in
// network bus order; an empty span means none.
inline PowerFlowResult solve_power_flow(const RadialNetwork& net,
                                        std::span<const Injection> injections = {},
                                        const PowerFlowOptions& opt = {}) {
    net.validate();
    if (!injections.empty() && injections.size() != net.buses.size())
        throw std::invalid_argument("solve_power_flow: injections must cover every bus");

    const std::size_t n = net.buses.size();
    const detail::SweepOrder order = detail::build_sweep_order(net);
    const double z_base = net.z_base_ohm();

    std::vector<std::complex<double>> demand_pu(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p = net.buses[i].p_load_kw;
        double q = net.buses[i].q_load_kvar;
        if (!injections.empty()) {
            p -= injections[i].p_kw;
            q -= injections[i].q_kvar;
        }
        demand_pu[i] = {p / net.s_base_kva, q / net.s_base_kva};
    }

    std::vector<std::complex<double>> z_pu(net.branches.size());
    for (std::size_t b = 0; b < net.branches.size(); ++b)
        z_pu[b] = {net.branches[b].r_ohm / z_base, net.branches[b].x_ohm / z_base};

    std::vector<std::complex<double>> v(n, {1.0, 0.0});
    std::vector<std::complex<double>> branch_i(net.branches.size(), {0.0, 0.0});
    std::vector<std::complex<double>> node_acc(n);

    double max_dv = 0.0;
    int sweep = 0;
    for (; sweep < opt.max_sweeps; ++sweep) {
        // backward: accumulate branch currents from the leaves
        for (std::size_t i = 0; i < n; ++i) node_acc[i] = std::conj(demand_pu[i] / v[i]);
        for (std::size_t k = order.branch_order.size(); k-- > 0;) {
            const std::size_t b = order.branch_order[k];
            branch_i[b] = node_acc[order.branch_child[k]];
            node_acc[order.branch_parent[k]] += branch_i[b];
        }
        // forward: voltage drops from the slack outward
        max_dv = 0.0;
        for (std::size_t k = 0; k < order.branch_order.size(); ++k) {
            const std::size_t b = order.branch_order[k];
            const std::complex<double> v_new = v[order.branch_parent[k]] - z_pu[b] * branch_i[b];
            max_dv = std::max(max_dv, std::abs(v_new - v[order.branch_child[k]]));
            v[order.branch_child[k]] = v_new;
        }
        if (!std::isfinite(max_dv))
            throw DivergenceError("solve_power_flow: diverged (non-finite voltages)", max_dv);
        if (max_dv < opt.tol_pu) {
            ++sweep;
            break;
        }
    }
    if (max_dv >= opt.tol_pu)
        throw DivergenceError("solve_power_flow: no convergence after " +
                                  std::to_string(opt.max_sweeps) +
                                  " sweeps, max voltage change " + std::to_string(max_dv) + " pu",
                              max_dv);

    // one consistent backward pass at the converged voltages
    for (std::size_t i = 0; i < n; ++i) node_acc[i] = std::conj(demand_pu[i] / v[i]);
    for (std::size_t k = order.branch_order.size(); k-- > 0;) {
        const std::size_t b = order.branch_order[k];
        branch_i[b] = node_acc[order.branch_child[k]];
        node_acc[order.branch_parent[k]] += branch_i[b];
    }
    for (std::size_t k = 0; k < order.branch_order.size(); ++k) {
        const std::size_t b = order.branch_order[k];
        v[order.branch_child[k]] = v[order.branch_parent[k]] - z_pu[b] * branch_i[b];
    }

    PowerFlowResult res;
    res.sweeps = sweep;
    res.max_dv_pu = max_dv;
    res.v_mag_pu.resize(n);
    for (std::size_t i = 0; i < n; ++i) res.v_mag_pu[i] = std::abs(v[i]);
    res.branch_p_kw.resize(net.branches.size());
    res.branch_q_kvar.resize(net.branches.size());
    res.branch_i_pu.resize(net.branches.size());
    for (std::size_t k = 0; k < order.branch_order.size(); ++k) {
        const std::size_t b = order.branch_order[k];
        const std::complex<double> s_send =
            v[order.branch_parent[k]] * std::conj(branch_i[b]) * net.s_base_kva;
        res.branch_p_kw[b] = s_send.real();
        res.branch_q_kvar[b] = s_send.imag();
        res.branch_i_pu[b] = std::abs(branch_i[b]);
        const double i2 = std::norm(branch_i[b]);
        res.p_loss_kw += z_pu[b].real() * i2 * net.s_base_kva;
        res.q_loss_kvar += z_pu[b].imag() * i2 * net.s_base_kva;
    }
    const std::size_t root = order.bus_order.front();
    const std::complex<double> s_slack = v[root] * std::conj(node_acc[root]) * net.s_base_kva -
                                         std::complex<double>(demand_pu[root]) * net.s_base_kva;
    res.slack_p_kw = s_slack.real();
    res.slack_q_kvar = s_slack.imag();
    return res;
}

struct LimitViolation {
    enum class Kind { UnderVoltage, OverVoltage, OverCurrent };
    Kind kind = Kind::UnderVoltage;
    int element = 0;   // bus id or branch index
    double value = 0.0;
    double limit = 0.0;
};

inline std::vector<LimitViolation> check_limits(const PowerFlowResult& result,
                                                const RadialNetwork& net) {
    std::vector<LimitViolation> out;
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const double v = result.v_mag_pu[i];
        if (v < net.v_min_pu)
            out.push_back({LimitViolation::Kind::UnderVoltage, net.buses[i].id, v, net.v_min_pu});
        else if (v > net.v_max_pu)
            out.push_back({LimitViolation::Kind::OverVoltage, net.buses[i].id, v, net.v_max_pu});
    }
    for (std::size_t b = 0; b < net.branches.size(); ++b) {
        if (net.branches[b].i_max_a <= 0.0) continue;
        const double i_a = result.branch_i_pu[b] * net.i_base_a();
        if (i_a > net.branches[b].i_max_a)
            out.push_back({LimitViolation::Kind::OverCurrent, static_cast<int>(b), i_a,
                           net.branches[b].i_max_a});
    }
    return out;
}

// Active/reactive mismatch of the system-wide balance: slack supply plus
// injections against loads plus losses. Near zero for a converged solve.
inline std::pair<double, double> balance_residual(const PowerFlowResult& result,
                                                  const RadialNetwork& net,
                                                  std::span<const Injection> injections = {}) {
    double inj_p = 0.0, inj_q = 0.0;
    for (const Injection& inj : injections) {
        inj_p += inj.p_kw;
        inj_q += inj.q_kvar;
    }
    const double dp = result.slack_p_kw + inj_p - net.total_load_kw() - result.p_loss_kw;
    const double dq = result.slack_q_kvar + inj_q - net.total_load_kvar() - result.q_loss_kvar;
    return {dp, dq};
}

// Network file layout: directive lines (key,value), then a branch section
// introduced by its header row "from,to,r_ohm,x_ohm[,i_max_a]", then a bus
// section introduced by "id,p_kw,q_kvar". '#' starts a comment.
inline RadialNetwork load_network_csv(const std::string& path) {
    RadialNetwork net;
    net.buses.clear();
    enum class Section { Directives, Branches, Buses } section = Section::Directives;
    for (const std::string& raw : csv::read_lines(path)) {
        if (csv::is_blank_or_comment(raw)) continue;
        const std::string line = csv::trim(raw);
        if (line.rfind("from,to,", 0) == 0) {
            section = Section::Branches;
            continue;
        }
        if (line.rfind("id,", 0) == 0) {
            section = Section::Buses;
            continue;
        }
        const auto fields = csv::split(line);
        switch (section) {
            case Section::Directives: {
                if (fields.size() != 2)
                    throw std::invalid_argument("network file: bad directive line '" + line + "'");
                const std::string& key = fields[0];
                if (key == "slack_bus")
                    net.slack_bus = csv::to_int(fields[1], "network slack_bus");
                else if (key == "v_base_kv")
                    net.v_base_kv = csv::to_double(fields[1], "network v_base_kv");
                else if (key == "s_base_kva")
                    net.s_base_kva = csv::to_double(fields[1], "network s_base_kva");
                else if (key == "v_min_pu")
                    net.v_min_pu = csv::to_double(fields[1], "network v_min_pu");
                else if (key == "v_max_pu")
                    net.v_max_pu = csv::to_double(fields[1], "network v_max_pu");
                else
                    throw std::invalid_argument("network file: unknown directive '" + key + "'");
                break;
            }
            case Section::Branches: {
                if (fields.size() != 4 && fields.size() != 5)
                    throw std::invalid_argument("network file: bad branch line '" + line + "'");
                Branch br;
                br.from_bus = csv::to_int(fields[0], "branch from");
                br.to_bus = csv::to_int(fields[1], "branch to");
                br.r_ohm = csv::to_double(fields[2], "branch r_ohm");
                br.x_ohm = csv::to_double(fields[3], "branch x_ohm");
                if (fields.size() == 5 && !fields[4].empty())
                    br.i_max_a = csv::to_double(fields[4], "branch i_max_a");
                net.branches.push_back(br);
                break;
            }
            case Section::Buses: {
                if (fields.size() != 3)
                    throw std::invalid_argument("network file: bad bus line '" + line + "'");
                Bus bus;
                bus.id = csv::to_int(fields[0], "bus id");
                bus.p_load_kw = csv::to_double(fields[1], "bus p_kw");
                bus.q_load_kvar = csv::to_double(fields[2], "bus q_kvar");
                net.buses.push_back(bus);
                break;
            }
        }
    }
    // buses named only by branch endpoints carry zero load
    std::map<int, bool> present;
    for (const Bus& b : net.buses) present[b.id] = true;
    for (const Branch& br : net.branches) {
        for (int id : {br.from_bus, br.to_bus}) {
            if (!present[id]) {
                present[id] = true;
                net.buses.push_back(Bus{id, 0.0, 0.0});
            }
        }
    }
    std::sort(net.buses.begin(), net.buses.end(),
              [](const Bus& a, const Bus& b) { return a.id < b.id; });
    net.validate();
    return net;
}

}  // namespace adnplan
