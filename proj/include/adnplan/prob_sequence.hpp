// Sequence-operation engine: discretization of mixed output distributions into
// probabilistic sequences, addition/subtraction-type convolutions, and the
// 96-slot expected-output precompute used by the planner.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "adnplan/uncertainty.hpp"

namespace adnplan {

inline constexpr int kSeasons = 4;
inline constexpr int kHoursPerDay = 24;
inline constexpr int kSlots = kSeasons * kHoursPerDay;

inline int slot_index(int season, int hour) {
    if (season < 1 || season > kSeasons || hour < 0 || hour >= kHoursPerDay)
        throw std::out_of_range("slot_index: season in 1..4 and hour in 0..23 required");
    return (season - 1) * kHoursPerDay + hour;
}

// Probabilities over the uniformly spaced power levels {0, q, 2q, ...}.
struct ProbSeq {
    double step_q = 1.0;  // kW per index
    std::vector<double> probs;

    std::size_t max_index() const { return probs.empty() ? 0 : probs.size() - 1; }

    bool valid(double tol = 1e-9) const {
        if (!(step_q > 0.0) || probs.empty()) return false;
        double sum = 0.0;
        for (double p : probs) {
            if (p < 0.0) return false;
            sum += p;
        }
        return std::fabs(sum - 1.0) <= tol;
    }
};

// Load sequences share the same representation as DG output sequences.
using LoadSequence = ProbSeq;

struct DegenerateStepError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IncompatibleSequenceError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IncompleteProfileError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

namespace detail {

// Adaptive Simpson integration, used only when a distribution supplies no
// closed-form cumulative.
inline double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double integrate_rec(const std::function<double(double)>& f, double a, double b, double fa,
                            double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return integrate_rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1) +
           integrate_rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10) {
    if (b <= a) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    return integrate_rec(f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), tol, 40);
}

}  // namespace detail

// Bucket the distribution with step q: bucket 0 collects [0, q/2] plus any
// atom at zero, interior bucket i collects [iq-q/2, iq+q/2], and the terminal
// bucket takes the upper tail plus any atom at p_max. The result is
// renormalized to sum to one exactly; raw_mass, when requested, reports the
// pre-normalization total so callers can warn about truncation.
inline ProbSeq discretize(const OutputDistribution& dist, double p_max_kw, double q_kw,
                          double* raw_mass = nullptr) {
    if (!(q_kw > 0.0)) throw std::invalid_argument("discretize: step size must be positive");
    if (p_max_kw < 0.0) throw std::invalid_argument("discretize: p_max must be non-negative");
    if (p_max_kw > 0.0 && q_kw > p_max_kw)
        throw DegenerateStepError("discretize: step size exceeds p_max");

    const std::size_t n =
        p_max_kw == 0.0 ? 0 : static_cast<std::size_t>(std::ceil(p_max_kw / q_kw - 1e-9));
    ProbSeq seq;
    seq.step_q = q_kw;
    seq.probs.assign(n + 1, 0.0);

    if (dist.density || dist.cumulative) {
        auto mass_between = [&](double lo, double hi) -> double {
            lo = std::max(lo, 0.0);
            hi = std::min(hi, p_max_kw);
            if (hi <= lo) return 0.0;
            if (dist.cumulative) return dist.cumulative(hi) - dist.cumulative(lo);
            return detail::integrate(dist.density, lo, hi);
        };
        for (std::size_t i = 0; i <= n; ++i) {
            const double center = static_cast<double>(i) * q_kw;
            const double lo = i == 0 ? 0.0 : center - 0.5 * q_kw;
            const double hi = i == n ? p_max_kw : center + 0.5 * q_kw;
            seq.probs[i] = std::max(0.0, mass_between(lo, hi));
        }
    }

    for (const PointMass& atom : dist.atoms) {
        const auto idx = static_cast<std::size_t>(std::clamp<long long>(
            std::llround(atom.location_kw / q_kw), 0, static_cast<long long>(n)));
        seq.probs[idx] += atom.probability;
    }

    double total = 0.0;
    for (double p : seq.probs) total += p;
    if (raw_mass) *raw_mass = total;
    if (total <= 1e-12)
        throw std::invalid_argument("discretize: distribution carries no probability mass");
    for (double& p : seq.probs) p /= total;
    return seq;
}

inline double expectation(const ProbSeq& seq) {
    double acc = 0.0;
    for (std::size_t i = 0; i < seq.probs.size(); ++i) acc += static_cast<double>(i) * seq.probs[i];
    return seq.step_q * acc;
}

namespace detail {

inline void check_steps(const ProbSeq& a, const ProbSeq& b, const char* where) {
    if (a.probs.empty() || b.probs.empty())
        throw std::invalid_argument(std::string(where) + ": empty sequence");
    const double scale = std::max(a.step_q, b.step_q);
    if (std::fabs(a.step_q - b.step_q) > 1e-12 * scale)
        throw IncompatibleSequenceError(std::string(where) + ": step sizes differ");
}

}  // namespace detail

// Addition-type convolution: distribution of the sum of two independent
// sequence-valued variables.
inline ProbSeq atc(const ProbSeq& a, const ProbSeq& b) {
    detail::check_steps(a, b, "atc");
    ProbSeq out;
    out.step_q = a.step_q;
    out.probs.assign(a.probs.size() + b.probs.size() - 1, 0.0);
    for (std::size_t ia = 0; ia < a.probs.size(); ++ia)
        for (std::size_t ib = 0; ib < b.probs.size(); ++ib)
            out.probs[ia + ib] += a.probs[ia] * b.probs[ib];
    return out;
}

// Subtraction-type convolution: index 0 absorbs all non-positive differences.
inline ProbSeq stc(const ProbSeq& a, const ProbSeq& b) {
    detail::check_steps(a, b, "stc");
    ProbSeq out;
    out.step_q = a.step_q;
    out.probs.assign(a.probs.size(), 0.0);
    for (std::size_t ia = 0; ia < a.probs.size(); ++ia)
        for (std::size_t ib = 0; ib < b.probs.size(); ++ib) {
            if (ia > ib)
                out.probs[ia - ib] += a.probs[ia] * b.probs[ib];
            else
                out.probs[0] += a.probs[ia] * b.probs[ib];
        }
    return out;
}

// Weather parameters for one representative hour of one season.
struct SlotWeather {
    int season = 1;
    int hour = 0;
    WeibullParams wind;
    bool pv_dark = true;
    double pv_mu = 0.0;
    double pv_sigma2 = 0.0;
};

struct HourlyExpectation {
    int season = 1;
    int hour = 0;
    double e_wt_per_kw = 0.0;  // expected output per kW of rated WT capacity
    double e_pv_per_kw = 0.0;  // expected output per kW of rated PV capacity
};

// Expected per-unit WT and PV outputs for all 96 representative hours. Each
// slot's distribution is discretized with step q (per-unit) and its
// expectation taken; dark PV slots contribute zero. Slots whose discretized
// mass falls short of one by more than 1e-3 before renormalization are
// reported through `warnings` when given.
inline std::vector<HourlyExpectation> hourly_expected_profiles(
    std::span<const SlotWeather> slots, const WTCurve& curve, double q_per_unit = 0.01,
    std::vector<std::string>* warnings = nullptr) {
    std::vector<bool> seen(kSlots, false);
    std::vector<SlotWeather> ordered(kSlots);
    for (const SlotWeather& s : slots) {
        const int idx = slot_index(s.season, s.hour);
        if (seen[idx])
            throw IncompleteProfileError("hourly_expected_profiles: duplicate slot (season " +
                                         std::to_string(s.season) + ", hour " +
                                         std::to_string(s.hour) + ")");
        seen[idx] = true;
        ordered[idx] = s;
    }
    for (int s = 1; s <= kSeasons; ++s)
        for (int h = 0; h < kHoursPerDay; ++h)
            if (!seen[slot_index(s, h)])
                throw IncompleteProfileError("hourly_expected_profiles: missing slot (season " +
                                             std::to_string(s) + ", hour " + std::to_string(h) +
                                             ")");

    WTCurve unit = curve;
    unit.p_rated_kw = 1.0;

    std::vector<HourlyExpectation> out(kSlots);
    auto warn_deficit = [&](const SlotWeather& w, const char* kind, double raw) {
        if (warnings && std::fabs(raw - 1.0) > 1e-3)
            warnings->push_back("season " + std::to_string(w.season) + ", hour " +
                                std::to_string(w.hour) + ": " + kind +
                                " sequence captured only " + std::to_string(raw) +
                                " of the probability mass before renormalization");
    };
    for (int idx = 0; idx < kSlots; ++idx) {
        const SlotWeather& w = ordered[idx];
        HourlyExpectation e;
        e.season = w.season;
        e.hour = w.hour;
        double raw = 1.0;
        e.e_wt_per_kw =
            expectation(discretize(wt_output_distribution(unit, w.wind), 1.0, q_per_unit, &raw));
        warn_deficit(w, "wind", raw);
        if (!w.pv_dark) {
            const BetaParams bp = beta_shapes_from_moments(w.pv_mu, w.pv_sigma2, 1.0);
            e.e_pv_per_kw =
                expectation(discretize(pv_output_distribution(bp), 1.0, q_per_unit, &raw));
            warn_deficit(w, "solar", raw);
        }
        e.e_wt_per_kw = std::clamp(e.e_wt_per_kw, 0.0, 1.0);
        e.e_pv_per_kw = std::clamp(e.e_pv_per_kw, 0.0, 1.0);
        out[idx] = e;
    }
    return out;
}

}  // namespace adnplan
