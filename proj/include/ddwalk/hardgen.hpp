#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ddwalk/rng.hpp"
#include "ddwalk/system.hpp"

namespace ddwalk {
namespace hardgen {

// One draw from the lower-bound instance distribution: two weight-k expanders
// joined by a single edge, n - 2k isolated vertices, S = I + L, and the two
// right-hand sides b0 = 0 and b1 = indicator of the B side.
struct HardInstance {
    SparseDDSystem system0;
    SparseDDSystem system1;
    std::vector<int> labels;   // labels[local] = global vertex id
    int w_gprime = -1;         // global id of the planted vertex in G'
    int w_b = -1;              // global id of the planted vertex in B
    int k = 0;
    int d = 0;
    double gamma = 0.0;        // min spectral expansion of the two halves
    std::vector<int> gprime;   // global ids of G' vertices
    std::vector<int> b_side;   // global ids of B vertices
};

// Connected simple d-regular graph on k vertices with spectral expansion
// gamma = min(lambda_2, 2 - lambda_k) of the normalized Laplacian > 2/3,
// produced by the pairing model with rejection.
std::pair<std::vector<std::pair<int, int>>, double> random_regular_expander(
    int k, int d, Rng& rng, int max_attempts = 1000);

// Spectral expansion of an undirected unweighted graph with no isolated
// vertices (dense eigendecomposition).
double spectral_expansion(const std::vector<std::pair<int, int>>& edges, int k);

HardInstance sample_mu_n(int n, int k, int d, Rng& rng);

// Acceptance threshold for the measured spectral expansion: the best gap a
// d-regular family can guarantee, 1 - 2 sqrt(d-1)/d (> 2/3 once d >= 36; a
// flat 2/3 cutoff is unreachable for small d by the Alon-Boppana bound).
double gamma_threshold(int d);

// Planted solution-gap constant of the lower-bound construction.
double c0(int d);

struct GapReport {
    double min_z1 = 0.0;       // min exact z*_u under b1 over sampled u in G'
    double max_abs_z0 = 0.0;   // max |z*_u| under b0 (must be 0)
    double c0_bound = 0.0;
    int trials = 0;
    bool pass = false;
};

// Exact dense check on the 2k-vertex connected component: z* = 0 under b0 and
// z*_u >= c0(d) under b1 for `trials` random u in G'. Throws GapViolation on
// failure.
GapReport verify_gap(const HardInstance& h, int trials, Rng& rng);

struct DistinguishResult {
    double success_rate_0 = 0.0;
    double success_rate_1 = 0.0;
    double mean_queries = 0.0;
};

// Per trial: fresh instance, random u in G', budgeted estimation on both
// right-hand sides, classify family 0 iff the estimate lands below c0(d)/2
// (a fair coin when the budget finished no sample at all).
DistinguishResult distinguish_experiment(int n, int k, int d,
                                         std::uint64_t budget, int trials,
                                         const RngSeq& seq);

}  // namespace hardgen
}  // namespace ddwalk
