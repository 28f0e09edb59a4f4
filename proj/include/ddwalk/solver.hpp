#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "ddwalk/oracle.hpp"
#include "ddwalk/rng.hpp"

namespace ddwalk {

enum class Mode { Expected, WorstCase };

struct WalkSample {
    double value = 0.0;
    std::uint32_t steps = 0;  // recursion depth (walk queries issued)
    bool truncated = false;
};

// One unbiased draw of the probabilistic recursion behind Sz = b: terminate
// at v with probability (|S_vv| - d_out(v))/|S_vv| returning the local value,
// otherwise step to a weighted random out-neighbor and flip the running sign
// by sgn(-S_vv S_vw). E[value] = z*_u. Requires a strictly DD system or the
// walk may never halt; pass the caller's delta as a hint to get a diagnostic.
inline WalkSample recursive_sample(Oracle& o, int u, Rng& rng,
                                   std::optional<double> delta_hint = std::nullopt) {
    if (delta_hint && !(*delta_hint > 0.0))
        throw NonTerminatingRisk("recursive sampling requires delta > 0");
    double sign = 1.0;
    std::uint32_t steps = 0;
    int v = u;
    for (;;) {
        const VertexAnswer a = o.vertex_query(v);
        const double abs_s = std::abs(a.s_uu);
        if (rng.next_double() * abs_s >= a.d_out) {
            const double gap = abs_s - a.d_out;
            const double val =
                a.b_u == 0.0 ? 0.0
                             : (a.s_uu > 0.0 ? sign : -sign) * a.b_u / gap;
            return {val, steps, false};
        }
        const auto w = o.random_walk_query(v, rng);
        // d_out > 0 on this branch, so the walk answer is never bottom
        if ((a.s_uu > 0.0) == (w->s_uv > 0.0)) sign = -sign;
        v = w->v;
        ++steps;
    }
}

// Truncated variant: tracks the survival probability p of the walk so far and
// returns 0 once p <= 1/(6 t'). Worst-case depth ceil((S_max/delta) log(6 t')).
inline WalkSample truncated_sample(Oracle& o, int u, double t_prime, Rng& rng,
                                   std::optional<double> delta_hint = std::nullopt) {
    if (!(t_prime > 0.0)) throw InvalidParameters("t_prime must be positive");
    if (delta_hint && !(*delta_hint > 0.0))
        throw NonTerminatingRisk("recursive sampling requires delta > 0");
    const double floor_p = 1.0 / (6.0 * t_prime);
    double sign = 1.0;
    double p = 1.0;
    std::uint32_t steps = 0;
    int v = u;
    for (;;) {
        const VertexAnswer a = o.vertex_query(v);
        const double abs_s = std::abs(a.s_uu);
        if (rng.next_double() * abs_s >= a.d_out) {
            const double gap = abs_s - a.d_out;
            const double val =
                a.b_u == 0.0 ? 0.0
                             : (a.s_uu > 0.0 ? sign : -sign) * a.b_u / gap;
            return {val, steps, false};
        }
        p *= a.d_out / abs_s;
        if (p <= floor_p) return {0.0, steps, true};
        const auto w = o.random_walk_query(v, rng);
        if ((a.s_uu > 0.0) == (w->s_uv > 0.0)) sign = -sign;
        v = w->v;
        ++steps;
    }
}

struct EstimateReport {
    double estimate = 0.0;
    std::uint64_t samples = 0;            // samples actually completed
    std::uint64_t requested_samples = 0;  // the t of the averaging estimator
    std::optional<double> truncation_threshold;
    std::uint64_t truncated_count = 0;
    LedgerSnapshot queries;  // queries consumed by this estimate
    double delta = 0.0;
    double eps = 0.0;
    double bmax = 0.0;
    Mode mode = Mode::Expected;
    bool partial = false;  // budget ran out before all samples finished
};

// Average of `t` samples; the low-level driver behind the estimators. With a
// budgeted ledger (threads must be 1) it returns the mean of the samples that
// completed before exhaustion, flagged partial. Sample i always consumes rng
// substream seq.stream(i), so the result is independent of thread count.
EstimateReport run_estimate(Oracle& o, int u, std::uint64_t t, Mode mode,
                            double t_prime, const RngSeq& seq, int threads = 1,
                            double bound_check = 0.0);

// t = ceil(6 bmax^2 / (delta^2 eps^2)) samples, additive error eps with
// probability >= 2/3.
EstimateReport estimate_entry(Oracle& o, int u, double delta, double eps,
                              double bmax, Mode mode, const RngSeq& seq,
                              int threads = 1);

// Median of max(1, ceil(24 ln(1/fail_prob))) independent runs.
EstimateReport estimate_entry_boosted(Oracle& o, int u, double delta, double eps,
                                      double bmax, Mode mode, double fail_prob,
                                      const RngSeq& seq, int threads = 1);

// Error eps * ||z*||_inf via the inner absolute error eps * bmax / (2 smax).
EstimateReport estimate_entry_relative(Oracle& o, int u, double delta, double eps,
                                       double bmax, double smax, Mode mode,
                                       const RngSeq& seq, int threads = 1);

// Non-strict / singular reduction: shift by sigma = smax / ((2/eps + 1) kappa_inf)
// and solve the strictly DD system at error eps/10 relative.
EstimateReport estimate_entry_nonstrict(Oracle& o, int u, double kappa_inf,
                                        double eps, double bmax, double smax,
                                        const RngSeq& seq, int threads = 1);

// Friedkin-Johnsen specialization: delta = 1, bmax = 1, worst-case mode.
EstimateReport estimate_fj_opinion(Oracle& o, int u, double eps, const RngSeq& seq,
                                   int threads = 1);

// Perturbation magnitude of the non-strict reduction.
double shift_sigma(double smax, double eps, double kappa_inf);

std::uint64_t sample_count(double delta, double eps, double bmax);
std::uint64_t boost_count(double fail_prob);

}  // namespace ddwalk
