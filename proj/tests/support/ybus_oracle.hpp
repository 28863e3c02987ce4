// Independent power-flow oracle: full Newton-Raphson on the bus admittance
// matrix in polar form, with a dense Gaussian-elimination linear solve. Shares
// no code with the forward-backward sweep it cross-checks.
#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "adnplan/radial_grid.hpp"

namespace testsupport {

struct YbusSolution {
    std::vector<double> v_mag_pu;  // network bus order
    double p_loss_kw = 0.0;
    int iterations = 0;
};

inline void solve_dense(std::vector<std::vector<double>>& a, std::vector<double>& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-14) throw std::runtime_error("singular Jacobian");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t col = n; col-- > 0;) {
        for (std::size_t c = col + 1; c < n; ++c) b[col] -= a[col][c] * b[c];
        b[col] /= a[col][col];
    }
}

inline YbusSolution newton_power_flow(const adnplan::RadialNetwork& net,
                                      std::span<const adnplan::Injection> injections = {},
                                      double tol = 1e-10, int max_iter = 60) {
    const std::size_t n = net.buses.size();
    std::map<int, std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) idx[net.buses[i].id] = i;
    const std::size_t slack = idx.at(net.slack_bus);
    const double z_base = net.z_base_ohm();

    std::vector<std::vector<std::complex<double>>> y(n, std::vector<std::complex<double>>(n));
    for (const adnplan::Branch& br : net.branches) {
        const std::size_t i = idx.at(br.from_bus), j = idx.at(br.to_bus);
        const std::complex<double> yb =
            1.0 / std::complex<double>(br.r_ohm / z_base, br.x_ohm / z_base);
        y[i][i] += yb;
        y[j][j] += yb;
        y[i][j] -= yb;
        y[j][i] -= yb;
    }

    std::vector<double> p_spec(n), q_spec(n);  // specified injections, pu
    for (std::size_t i = 0; i < n; ++i) {
        double p = -net.buses[i].p_load_kw, q = -net.buses[i].q_load_kvar;
        if (!injections.empty()) {
            p += injections[i].p_kw;
            q += injections[i].q_kvar;
        }
        p_spec[i] = p / net.s_base_kva;
        q_spec[i] = q / net.s_base_kva;
    }

    std::vector<double> vm(n, 1.0), va(n, 0.0);
    std::vector<std::size_t> pq;  // all buses except the slack
    for (std::size_t i = 0; i < n; ++i)
        if (i != slack) pq.push_back(i);
    const std::size_t m = pq.size();

    auto calc_pq = [&](std::size_t i, double& p, double& q) {
        p = 0.0;
        q = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double g = y[i][j].real(), b = y[i][j].imag();
            const double d = va[i] - va[j];
            p += vm[i] * vm[j] * (g * std::cos(d) + b * std::sin(d));
            q += vm[i] * vm[j] * (g * std::sin(d) - b * std::cos(d));
        }
    };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        std::vector<double> mismatch(2 * m);
        double worst = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double p, q;
            calc_pq(pq[k], p, q);
            mismatch[k] = p_spec[pq[k]] - p;
            mismatch[m + k] = q_spec[pq[k]] - q;
            worst = std::max({worst, std::fabs(mismatch[k]), std::fabs(mismatch[m + k])});
        }
        if (worst < tol) break;

        std::vector<std::vector<double>> jac(2 * m, std::vector<double>(2 * m, 0.0));
        for (std::size_t r = 0; r < m; ++r) {
            const std::size_t i = pq[r];
            double pi, qi;
            calc_pq(i, pi, qi);
            for (std::size_t c = 0; c < m; ++c) {
                const std::size_t j = pq[c];
                const double g = y[i][j].real(), b = y[i][j].imag();
                if (i == j) {
                    jac[r][c] = -qi - b * vm[i] * vm[i];                    // dP/dtheta
                    jac[r][m + c] = pi / vm[i] + g * vm[i];                 // dP/dV
                    jac[m + r][c] = pi - g * vm[i] * vm[i];                 // dQ/dtheta
                    jac[m + r][m + c] = qi / vm[i] - b * vm[i];             // dQ/dV
                } else {
                    const double d = va[i] - va[j];
                    const double common = vm[i] * vm[j];
                    jac[r][c] = common * (g * std::sin(d) - b * std::cos(d));
                    jac[r][m + c] = vm[i] * (g * std::cos(d) + b * std::sin(d));
                    jac[m + r][c] = -common * (g * std::cos(d) + b * std::sin(d));
                    jac[m + r][m + c] = vm[i] * (g * std::sin(d) - b * std::cos(d));
                }
            }
        }
        solve_dense(jac, mismatch);
        for (std::size_t k = 0; k < m; ++k) {
            va[pq[k]] += mismatch[k];
            vm[pq[k]] += mismatch[m + k];
        }
    }
    if (iter == max_iter) throw std::runtime_error("newton_power_flow: no convergence");

    YbusSolution sol;
    sol.iterations = iter;
    sol.v_mag_pu = vm;
    // losses equal the sum of all bus injections, slack included
    double total_inj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p, q;
        calc_pq(i, p, q);
        total_inj += p;
    }
    sol.p_loss_kw = total_inj * net.s_base_kva;
    return sol;
}

}  // namespace testsupport
