#include "ddwalk/hardgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "ddwalk/errors.hpp"
#include "ddwalk/oracle.hpp"
#include "ddwalk/reference.hpp"
#include "ddwalk/solver.hpp"

namespace ddwalk {
namespace hardgen {

namespace {

bool connected(const std::vector<std::pair<int, int>>& edges, int k) {
    std::vector<std::vector<int>> adj(k);
    for (auto [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<char> seen(k, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == k;
}

}  // namespace

double spectral_expansion(const std::vector<std::pair<int, int>>& edges, int k) {
    std::vector<int> deg(k, 0);
    std::vector<double> a(static_cast<std::size_t>(k) * k, 0.0);
    for (auto [u, v] : edges) {
        ++deg[u];
        ++deg[v];
        a[u * static_cast<std::size_t>(k) + v] = 1.0;
        a[v * static_cast<std::size_t>(k) + u] = 1.0;
    }
    // normalized Laplacian I - D^{-1/2} A D^{-1/2}
    std::vector<double> nl(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
        nl[i * static_cast<std::size_t>(k) + i] = 1.0;
        for (int j = 0; j < k; ++j)
            if (a[i * static_cast<std::size_t>(k) + j] != 0.0)
                nl[i * static_cast<std::size_t>(k) + j] =
                    -1.0 / std::sqrt(static_cast<double>(deg[i]) * deg[j]);
    }
    std::vector<double> w, v;
    if (!reference::jacobi_eigensymm(nl, k, w, v))
        throw NonConvergence("eigensolver failed on normalized Laplacian");
    std::sort(w.begin(), w.end());
    return std::min(w[1], 2.0 - w[k - 1]);
}

std::pair<std::vector<std::pair<int, int>>, double> random_regular_expander(
    int k, int d, Rng& rng, int max_attempts) {
    if (d < 3 || k <= d || (static_cast<long long>(k) * d) % 2 != 0)
        throw InvalidParams("regular graph needs d >= 3, k > d, k*d even");

    // Start from a circulant d-regular graph and randomize it with double-edge
    // swaps that preserve simplicity (whole-configuration pairing has
    // acceptance rate ~exp(-(d^2-1)/4), hopeless for d = 8).
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<std::pair<int, int>> edges;
        std::set<std::pair<int, int>> seen;
        auto has = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            return seen.count({a, b}) != 0;
        };
        auto put = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            seen.insert({a, b});
        };
        auto drop = [&](int a, int b) {
            if (a > b) std::swap(a, b);
            seen.erase({a, b});
        };
        const int half = d / 2;
        for (int i = 0; i < k; ++i)
            for (int j = 1; j <= half; ++j) {
                const int t = (i + j) % k;
                if (!has(i, t)) {
                    put(i, t);
                    edges.push_back({std::min(i, t), std::max(i, t)});
                }
            }
        if (d % 2 == 1)
            for (int i = 0; i < k / 2; ++i) {
                put(i, i + k / 2);
                edges.push_back({i, i + k / 2});
            }

        const std::size_t m = edges.size();
        const std::size_t swaps = 40 * m;
        for (std::size_t s = 0; s < swaps; ++s) {
            const std::size_t ei = rng.next_index(m);
            const std::size_t ej = rng.next_index(m);
            auto [a, b] = edges[ei];
            auto [c, e] = edges[ej];
            if (rng.next_coin(0.5)) std::swap(c, e);
            if (a == c || a == e || b == c || b == e) continue;
            if (has(a, c) || has(b, e)) continue;
            drop(a, b);
            drop(c, e);
            put(a, c);
            put(b, e);
            edges[ei] = {std::min(a, c), std::max(a, c)};
            edges[ej] = {std::min(b, e), std::max(b, e)};
        }

        if (!connected(edges, k)) continue;
        const double gamma = spectral_expansion(edges, k);
        if (gamma > gamma_threshold(d)) return {edges, gamma};
    }
    throw ExpanderNotFound("no expander with gamma > " +
                           std::to_string(gamma_threshold(d)) + " after " +
                           std::to_string(max_attempts) + " attempts");
}

double gamma_threshold(int d) {
    return 1.0 - 2.0 * std::sqrt(static_cast<double>(d - 1)) / d;
}

HardInstance sample_mu_n(int n, int k, int d, Rng& rng) {
    if (n < 2 * k) throw InvalidParams("mu_n requires n >= 2k");
    auto [edges_g, gamma_g] = random_regular_expander(k, d, rng);
    auto [edges_b, gamma_b] = random_regular_expander(k, d, rng);

    HardInstance h;
    h.k = k;
    h.d = d;
    h.gamma = std::min(gamma_g, gamma_b);

    h.labels.resize(n);
    std::iota(h.labels.begin(), h.labels.end(), 0);
    rng.shuffle(h.labels.data(), h.labels.size());

    const int wg_local = static_cast<int>(rng.next_index(k));
    const int wb_local = static_cast<int>(rng.next_index(k));
    h.w_gprime = h.labels[wg_local];
    h.w_b = h.labels[k + wb_local];
    for (int i = 0; i < k; ++i) {
        h.gprime.push_back(h.labels[i]);
        h.b_side.push_back(h.labels[k + i]);
    }

    const double weight = static_cast<double>(k);
    std::vector<std::vector<int>> adj(n);
    auto add_edge = [&](int gu, int gv) {
        adj[gu].push_back(gv);
        adj[gv].push_back(gu);
    };
    for (auto [a, b] : edges_g) add_edge(h.labels[a], h.labels[b]);
    for (auto [a, b] : edges_b) add_edge(h.labels[k + a], h.labels[k + b]);
    add_edge(h.w_gprime, h.w_b);

    // per-vertex uniform neighbor orderings drive the neighbor query
    for (auto& row : adj) rng.shuffle(row.data(), row.size());

    std::vector<std::pair<int, double>> diag(n);
    std::vector<std::pair<std::pair<int, int>, double>> offdiag;
    offdiag.reserve(static_cast<std::size_t>(n) * (d + 1));
    for (int u = 0; u < n; ++u) {
        diag[u] = {u, 1.0 + weight * static_cast<double>(adj[u].size())};
        for (int v : adj[u]) offdiag.push_back({{u, v}, -weight});
    }

    std::vector<double> b0(n, 0.0);
    std::vector<double> b1(n, 0.0);
    for (int gb : h.b_side) b1[gb] = 1.0;

    h.system0 = SparseDDSystem::from_triplets(n, diag, offdiag, b0);
    h.system1 = h.system0.with_rhs(std::move(b1));
    return h;
}

double c0(int d) {
    return (1.0 - std::exp(-1.0 / (20.0 * d))) / (12.0 * (d + 2.0));
}

GapReport verify_gap(const HardInstance& h, int trials, Rng& rng) {
    const int k = h.k;
    const int m = 2 * k;  // connected component G' + B
    std::vector<int> comp;
    comp.reserve(m);
    comp.insert(comp.end(), h.gprime.begin(), h.gprime.end());
    comp.insert(comp.end(), h.b_side.begin(), h.b_side.end());
    std::vector<int> local(h.system0.n(), -1);
    for (int i = 0; i < m; ++i) local[comp[i]] = i;

    // densify the component of S; rows touching C do not exist by construction
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> b1(m, 0.0);
    const auto& sys = h.system1;
    for (int i = 0; i < m; ++i) {
        const int g = comp[i];
        a[i * static_cast<std::size_t>(m) + i] = sys.diag(g);
        const auto cols = sys.row_cols(g);
        const auto w = sys.row_weights(g);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            const int lj = local[cols[p]];
            if (lj < 0) throw Error("hard instance edge leaves the component");
            a[i * static_cast<std::size_t>(m) + lj] = w[p];
        }
        b1[i] = sys.b(g);
    }
    const auto sol1 = reference::dense_solve(a, b1);
    if (sol1.singular_flag) throw Error("component system unexpectedly singular");

    GapReport rep;
    rep.c0_bound = c0(h.d);
    rep.trials = trials;
    double min_z1 = 1e300;
    for (int t = 0; t < trials; ++t) {
        const int g = h.gprime[rng.next_index(h.gprime.size())];
        // b0 = 0 makes z = 0 the unique solution; check it exactly
        rep.max_abs_z0 = std::max(rep.max_abs_z0, std::abs(h.system0.b(g)));
        min_z1 = std::min(min_z1, sol1.z[local[g]]);
    }
    rep.min_z1 = min_z1;
    rep.pass = rep.max_abs_z0 == 0.0 && min_z1 >= rep.c0_bound;
    if (!rep.pass)
        throw GapViolation("gap check failed: min z1 = " + std::to_string(min_z1) +
                           " < c0 = " + std::to_string(rep.c0_bound));
    return rep;
}

DistinguishResult distinguish_experiment(int n, int k, int d,
                                         std::uint64_t budget, int trials,
                                         const RngSeq& seq) {
    if (budget < 1) throw InvalidParams("budget must be >= 1");
    const double threshold = c0(d) / 2.0;
    const double eps = c0(d) / 4.0;

    int correct0 = 0;
    int correct1 = 0;
    std::uint64_t total_queries = 0;
    for (int t = 0; t < trials; ++t) {
        Rng gen = seq.stream(t);
        const HardInstance h = sample_mu_n(n, k, d, gen);
        const int u = h.gprime[gen.next_index(h.gprime.size())];

        for (int family = 0; family < 2; ++family) {
            QueryLedger ledger{budget};
            const SparseDDSystem& sys = family == 0 ? h.system0 : h.system1;
            Oracle o(sys, ledger);
            const EstimateReport rep = estimate_entry(
                o, u, 1.0, eps, 1.0, Mode::WorstCase,
                seq.derived(static_cast<std::uint64_t>(t) * 2 + family));
            total_queries += ledger.total();
            if (ledger.total() > budget) throw Error("ledger exceeded budget");

            bool says_family0;
            if (rep.samples == 0) {
                says_family0 = gen.next_coin(0.5);  // no information gathered
            } else {
                says_family0 = rep.estimate < threshold;
            }
            if (family == 0 && says_family0) ++correct0;
            if (family == 1 && !says_family0) ++correct1;
        }
    }

    DistinguishResult res;
    res.success_rate_0 = static_cast<double>(correct0) / trials;
    res.success_rate_1 = static_cast<double>(correct1) / trials;
    res.mean_queries = static_cast<double>(total_queries) / (2.0 * trials);
    return res;
}

}  // namespace hardgen
}  // namespace ddwalk
