#include "ddwalk/solver.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace ddwalk {

namespace {
constexpr std::uint64_t kBlock = 4096;  // fixed reduction granularity

struct BlockResult {
    double sum = 0.0;
    std::uint64_t truncated = 0;
};
}  // namespace

std::uint64_t sample_count(double delta, double eps, double bmax) {
    const double t = 6.0 * bmax * bmax / (delta * delta * eps * eps);
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(t)));
}

std::uint64_t boost_count(double fail_prob) {
    return std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::ceil(24.0 * std::log(1.0 / fail_prob))));
}

EstimateReport run_estimate(Oracle& o, int u, std::uint64_t t, Mode mode,
                            double t_prime, const RngSeq& seq, int threads,
                            double bound_check) {
    EstimateReport rep;
    rep.requested_samples = t;
    rep.mode = mode;
    if (mode == Mode::WorstCase) rep.truncation_threshold = 1.0 / (6.0 * t_prime);

    const LedgerSnapshot before = o.ledger().snapshot();
    const std::uint64_t nblocks = (t + kBlock - 1) / kBlock;
    std::vector<BlockResult> blocks(nblocks);

    std::uint64_t completed = 0;

    auto run_block = [&](Oracle& oracle, std::uint64_t bi,
                         std::uint64_t& done) {
        const std::uint64_t lo = bi * kBlock;
        const std::uint64_t hi = std::min(t, lo + kBlock);
        BlockResult& r = blocks[bi];
        for (std::uint64_t i = lo; i < hi; ++i) {
            Rng rng = seq.stream(i);
            const WalkSample s = mode == Mode::Expected
                                     ? recursive_sample(oracle, u, rng)
                                     : truncated_sample(oracle, u, t_prime, rng);
            if (!s.truncated && bound_check > 0.0 &&
                std::abs(s.value) > bound_check * (1.0 + 1e-12))
                throw Error("sample value exceeds bmax/delta bound");
            r.sum += s.value;
            r.truncated += s.truncated ? 1 : 0;
            ++done;
        }
    };

    const bool budgeted = o.ledger().budget().has_value();
    if (threads <= 1 || budgeted || nblocks == 1) {
        try {
            for (std::uint64_t bi = 0; bi < nblocks; ++bi) run_block(o, bi, completed);
        } catch (const BudgetExhausted&) {
            // the in-flight sample is discarded; finished samples were already
            // folded into their block sums
            rep.partial = true;
        }
    } else {
        const int nw = static_cast<int>(
            std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), nblocks));
        std::vector<QueryLedger> sub(nw);
        std::vector<std::uint64_t> done(nw, 0);
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) {
            pool.emplace_back([&, w] {
                Oracle local = o.with_ledger(sub[w]);
                for (std::uint64_t bi = w; bi < nblocks; bi += nw)
                    run_block(local, bi, done[w]);
            });
        }
        for (auto& th : pool) th.join();
        for (int w = 0; w < nw; ++w) {
            o.ledger().merge(sub[w]);
            completed += done[w];
        }
    }

    double sum = 0.0;
    for (const auto& bl : blocks) {
        sum += bl.sum;
        rep.truncated_count += bl.truncated;
    }
    rep.samples = completed;
    rep.estimate = completed > 0 ? sum / static_cast<double>(completed) : 0.0;

    const LedgerSnapshot after = o.ledger().snapshot();
    rep.queries = {after.vertex - before.vertex, after.neighbor - before.neighbor,
                   after.walk - before.walk};
    return rep;
}

EstimateReport estimate_entry(Oracle& o, int u, double delta, double eps,
                              double bmax, Mode mode, const RngSeq& seq,
                              int threads) {
    if (!(delta > 0.0) || !(eps > 0.0) || bmax < 0.0)
        throw InvalidParameters("estimate_entry requires delta > 0, eps > 0, bmax >= 0");
    const std::uint64_t t = sample_count(delta, eps, bmax);
    EstimateReport rep = run_estimate(o, u, t, mode, static_cast<double>(t), seq,
                                      threads, bmax > 0.0 ? bmax / delta : 0.0);
    rep.delta = delta;
    rep.eps = eps;
    rep.bmax = bmax;
    return rep;
}

EstimateReport estimate_entry_boosted(Oracle& o, int u, double delta, double eps,
                                      double bmax, Mode mode, double fail_prob,
                                      const RngSeq& seq, int threads) {
    if (!(fail_prob > 0.0) || !(fail_prob < 1.0))
        throw InvalidParameters("fail_prob must be in (0,1)");
    const std::uint64_t m = boost_count(fail_prob);
    std::vector<EstimateReport> runs;
    runs.reserve(m);
    for (std::uint64_t j = 0; j < m; ++j)
        runs.push_back(estimate_entry(o, u, delta, eps, bmax, mode,
                                      seq.derived(j), threads));
    std::vector<double> values;
    values.reserve(m);
    for (const auto& r : runs) values.push_back(r.estimate);
    std::sort(values.begin(), values.end());
    // lower median for even m
    EstimateReport rep = runs.front();
    rep.estimate = values[(m - 1) / 2];
    rep.samples = 0;
    rep.queries = {};
    for (const auto& r : runs) {
        rep.samples += r.samples;
        rep.queries.vertex += r.queries.vertex;
        rep.queries.neighbor += r.queries.neighbor;
        rep.queries.walk += r.queries.walk;
        rep.partial = rep.partial || r.partial;
    }
    return rep;
}

EstimateReport estimate_entry_relative(Oracle& o, int u, double delta, double eps,
                                       double bmax, double smax, Mode mode,
                                       const RngSeq& seq, int threads) {
    if (!(delta > 0.0) || !(eps > 0.0) || bmax < 0.0 || !(smax > 0.0))
        throw InvalidParameters("estimate_entry_relative: bad parameters");
    if (bmax == 0.0) {
        // DegenerateRHS: z* = 0, answer exactly without any query
        EstimateReport rep;
        rep.delta = delta;
        rep.eps = eps;
        rep.mode = mode;
        return rep;
    }
    const double inner_eps = eps * bmax / (2.0 * smax);
    return estimate_entry(o, u, delta, inner_eps, bmax, mode, seq, threads);
}

double shift_sigma(double smax, double eps, double kappa_inf) {
    return smax / ((2.0 / eps + 1.0) * kappa_inf);
}

EstimateReport estimate_entry_nonstrict(Oracle& o, int u, double kappa_inf,
                                        double eps, double bmax, double smax,
                                        const RngSeq& seq, int threads) {
    if (!(kappa_inf >= 1.0) || !(eps > 0.0) || bmax < 0.0 || !(smax > 0.0))
        throw InvalidParameters("estimate_entry_nonstrict: bad parameters");
    const double sigma = shift_sigma(smax, eps, kappa_inf);
    Oracle shifted = o.shifted(sigma);
    return estimate_entry_relative(shifted, u, sigma, eps / 10.0, bmax,
                                   smax + sigma, Mode::WorstCase, seq, threads);
}

EstimateReport estimate_fj_opinion(Oracle& o, int u, double eps, const RngSeq& seq,
                                   int threads) {
    return estimate_entry(o, u, 1.0, eps, 1.0, Mode::WorstCase, seq, threads);
}

}  // namespace ddwalk
