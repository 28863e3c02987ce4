// Binary particle swarm optimizer with sigmoid transfer, population-fitness-
// variance stagnation detection, and Tent-map chaotic reseeding. Shared search
// engine for both planning levels; minimization throughout.
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "adnplan/csv.hpp"

namespace adnplan {

using BitVector = std::vector<std::uint8_t>;

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic uniform stream; every (seed, particle, iteration) triple gets
// its own stream so parallel and serial execution agree.
class Rand01 {
public:
    explicit Rand01(std::uint64_t seed) : state_(seed) {}
    double operator()() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t state_;
};

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t particle,
                                 std::uint64_t iteration) {
    return detail::mix64(seed ^ detail::mix64(particle ^ detail::mix64(iteration)));
}

struct SwarmConfig {
    int n_particles = 50;
    int max_iter = 100;
    double w_max = 0.9;
    double w_min = 0.4;
    double c1 = 2.0;
    double c2 = 2.0;
    double v_clamp = 6.0;
    double low_thr = 0.99;
    double up_thr = 1.01;
    std::uint64_t seed = 1;
};

struct IterationStats {
    int iteration = 0;
    double best_fitness = 0.0;
    double mean_fitness = 0.0;
    double pfv = 0.0;
    bool chaos_triggered = false;
};

struct RunResult {
    BitVector best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<IterationStats> history;
};

inline double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

template <class Rng>
void velocity_update(std::vector<double>& velocity, const BitVector& position,
                     const BitVector& pbest, const BitVector& gbest, double w, double c1,
                     double c2, double v_clamp, Rng&& rand01) {
    for (std::size_t k = 0; k < velocity.size(); ++k) {
        const double r1 = rand01();
        const double r2 = rand01();
        double v = w * velocity[k] + c1 * r1 * (pbest[k] - position[k]) +
                   c2 * r2 * (gbest[k] - position[k]);
        if (v > v_clamp) v = v_clamp;
        if (v < -v_clamp) v = -v_clamp;
        velocity[k] = v;
    }
}

template <class Rng>
std::uint8_t position_update(double velocity, Rng&& rand01) {
    return rand01() < sigmoid(velocity) ? 1 : 0;
}

// Population fitness variance, normalized by the best (minimum) fitness; a
// vanishing best fitness falls back to a unit normalizer.
inline double pfv(std::span<const double> fitnesses) {
    if (fitnesses.empty()) throw std::invalid_argument("pfv: empty population");
    double best = fitnesses[0], avg = 0.0;
    for (double f : fitnesses) {
        best = std::min(best, f);
        avg += f;
    }
    avg /= static_cast<double>(fitnesses.size());
    const double denom = std::fabs(best) < 1e-12 ? 1.0 : best;
    double s = 0.0;
    for (double f : fitnesses) {
        const double d = (f - avg) / denom;
        s += d * d;
    }
    return s;
}

// The variance ratio sitting inside the (low_thr, up_thr) band signals a
// crowded population; a fully converged population (previous variance zero)
// counts as stagnation as well.
inline bool stagnation_detected(double sigma2_prev, double sigma2_curr, double low_thr,
                                double up_thr) {
    if (sigma2_prev < 0.0)
        throw std::invalid_argument("stagnation_detected: variance must be non-negative");
    if (sigma2_prev == 0.0) return true;
    const double ratio = sigma2_curr / sigma2_prev;
    return low_thr < ratio && ratio < up_thr;
}

// One Tent-map step. Landing within 1e-12 of a fixed point {0, 0.25, 0.5,
// 0.75} or a periodic point {0.2, 0.4, 0.6, 0.8} would freeze the orbit, so
// those results are nudged with a random perturbation.
template <class Rng>
double tent_step(double t, Rng&& rand01) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("tent_step: t must lie in [0,1]");
    double r = t <= 0.5 ? 2.0 * t : 2.0 * (1.0 - t);
    for (double c : {0.0, 0.25, 0.5, 0.75, 0.2, 0.4, 0.6, 0.8}) {
        if (std::fabs(r - c) <= 1e-12) {
            r = (r + rand01()) / 2.0;
            break;
        }
    }
    return r;
}

namespace detail {

inline std::size_t hamming_weight(const BitVector& bits) {
    std::size_t h = 0;
    for (std::uint8_t b : bits) h += b;
    return h;
}

constexpr std::uint64_t kChaosSalt = 0xC4A05EED00000000ull;

}  // namespace detail

// Minimizes fitness over bit vectors of length n_bits. Warm-start positions,
// when given, seed the first particles. Identical configs produce identical
// results, history included.
template <class Fitness>
RunResult run(Fitness&& fitness, std::size_t n_bits, const SwarmConfig& cfg,
              std::span<const BitVector> warm_starts = {}) {
    if (n_bits == 0) throw std::invalid_argument("ibpso::run: n_bits must be at least 1");
    if (cfg.n_particles < 2) throw std::invalid_argument("ibpso::run: need at least 2 particles");

    const auto np = static_cast<std::size_t>(cfg.n_particles);
    std::vector<BitVector> position(np, BitVector(n_bits, 0));
    std::vector<std::vector<double>> velocity(np, std::vector<double>(n_bits, 0.0));
    std::vector<BitVector> pbest(np);
    std::vector<double> pbest_fitness(np);
    std::vector<double> current(np);

    for (std::size_t n = 0; n < np; ++n) {
        Rand01 rng(stream_seed(cfg.seed, n, 0));
        if (n < warm_starts.size()) {
            if (warm_starts[n].size() != n_bits)
                throw std::invalid_argument("ibpso::run: warm start has wrong length");
            position[n] = warm_starts[n];
        } else {
            for (std::size_t k = 0; k < n_bits; ++k) position[n][k] = rng() < 0.5 ? 1 : 0;
        }
        for (std::size_t k = 0; k < n_bits; ++k) velocity[n][k] = 2.0 * rng() - 1.0;
        current[n] = fitness(position[n]);
        pbest[n] = position[n];
        pbest_fitness[n] = current[n];
    }

    RunResult result;
    std::size_t best_particle = 0;
    for (std::size_t n = 0; n < np; ++n) {
        if (pbest_fitness[n] < result.best_fitness) {
            result.best_fitness = pbest_fitness[n];
            result.best_position = pbest[n];
            best_particle = n;
        }
    }

    auto record = [&](int iter, double sigma2, bool chaos) {
        double mean = 0.0;
        for (double f : current) mean += f;
        mean /= static_cast<double>(np);
        result.history.push_back({iter, result.best_fitness, mean, sigma2, chaos});
    };

    double sigma2_prev = pfv(current);
    record(0, sigma2_prev, false);

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        const double w = cfg.max_iter > 1
                             ? cfg.w_max - (cfg.w_max - cfg.w_min) * (iter - 1) /
                                               static_cast<double>(cfg.max_iter - 1)
                             : cfg.w_max;
        for (std::size_t n = 0; n < np; ++n) {
            Rand01 rng(stream_seed(cfg.seed, n, static_cast<std::uint64_t>(iter)));
            velocity_update(velocity[n], position[n], pbest[n], result.best_position, w, cfg.c1,
                            cfg.c2, cfg.v_clamp, rng);
            for (std::size_t k = 0; k < n_bits; ++k)
                position[n][k] = position_update(velocity[n][k], rng);
            current[n] = fitness(position[n]);
            if (current[n] < pbest_fitness[n]) {
                pbest_fitness[n] = current[n];
                pbest[n] = position[n];
            }
            if (current[n] < result.best_fitness) {
                result.best_fitness = current[n];
                result.best_position = position[n];
                best_particle = n;
            }
        }

        const double sigma2_curr = pfv(current);
        const bool chaos =
            stagnation_detected(sigma2_prev, sigma2_curr, cfg.low_thr, cfg.up_thr);
        record(iter, sigma2_curr, chaos);

        if (chaos) {
            // regenerate every particle but the current best from a chaotic
            // orbit seeded by its own bit pattern
            for (std::size_t n = 0; n < np; ++n) {
                if (n == best_particle) continue;
                Rand01 rng(stream_seed(cfg.seed ^ detail::kChaosSalt, n,
                                       static_cast<std::uint64_t>(iter)));
                double t = (static_cast<double>(detail::hamming_weight(position[n])) + rng()) /
                           (static_cast<double>(n_bits) + 1.0);
                for (int i = 0; i < 5; ++i) t = tent_step(t, rng);
                for (std::size_t k = 0; k < n_bits; ++k) {
                    t = tent_step(t, rng);
                    position[n][k] = t > 0.5 ? 1 : 0;
                }
                for (double& v : velocity[n]) v = 0.0;
            }
        }
        sigma2_prev = sigma2_curr;
    }
    return result;
}

inline void write_history_csv(std::ostream& out, std::span<const IterationStats> history) {
    out << "iteration,best_fitness,mean_fitness,pfv,chaos_triggered\n";
    for (const IterationStats& s : history) {
        out << s.iteration << ',' << csv::format_sig(s.best_fitness) << ','
            << csv::format_sig(s.mean_fitness) << ',' << csv::format_sig(s.pfv) << ','
            << (s.chaos_triggered ? 1 : 0) << '\n';
    }
}

}  // namespace adnplan
